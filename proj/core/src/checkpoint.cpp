#include "multisiam/checkpoint.h"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "delimited.h"

namespace multisiam {
namespace {

using nlohmann::json;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::string_view bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + static_cast<std::size_t>(i)])) << (8 * i);
  }
  return v;
}

json config_to_json(const TrainConfig& c) {
  return json{{"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"group_size", c.group_size},
              {"text_size", c.text_size},
              {"embed_dim", c.embed_dim},
              {"hidden", c.hidden},
              {"min_freq", c.min_freq},
              {"learning_rate", c.learning_rate},
              {"alpha", c.alpha},
              {"lambda_dup", c.lambda_dup},
              {"tau", c.tau},
              {"clip_norm", c.clip_norm},
              {"seed", c.seed},
              {"optimizer", c.optimizer},
              {"qid_disjoint", c.qid_disjoint},
              {"pooling", pooling_name(c.pooling)}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.group_size = j.at("group_size").get<std::size_t>();
  c.text_size = j.at("text_size").get<std::size_t>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.min_freq = j.at("min_freq").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.lambda_dup = j.at("lambda_dup").get<double>();
  c.tau = j.at("tau").get<double>();
  c.clip_norm = j.at("clip_norm").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.optimizer = j.at("optimizer").get<std::string>();
  c.qid_disjoint = j.at("qid_disjoint").get<bool>();
  c.pooling = parse_pooling(j.at("pooling").get<std::string>());
  return c;
}

// Zero-valued model of the right shapes, filled from the file afterwards.
MultiSiamModel empty_multisiam(const EncoderConfig& cfg) {
  MultiSiamModel m;
  m.config = cfg;
  m.embedding.table = Tensor({cfg.vocab_size, cfg.embed_dim});
  m.encoder = LstmLayer{Tensor({4 * cfg.hidden, cfg.embed_dim + cfg.hidden}), Tensor({4 * cfg.hidden})};
  return m;
}

SmcdModel empty_smcd(const SmcdConfig& cfg) {
  SmcdModel m;
  m.config = cfg;
  auto lstm = [](std::size_t in, std::size_t h) { return LstmLayer{Tensor({4 * h, in + h}), Tensor({4 * h})}; };
  m.embedding.table = Tensor({cfg.vocab_size, cfg.embed_dim});
  m.trunk_lstm = lstm(cfg.embed_dim, cfg.hidden);
  m.cls_lstm = lstm(cfg.hidden, cfg.hidden);
  m.cls_dense = DenseLayer{Tensor({cfg.hidden, cfg.num_categories}), Tensor({cfg.num_categories})};
  m.dup_lstm = lstm(cfg.hidden, cfg.hidden);
  return m;
}

json manifest(const ParamList& params) {
  json out = json::array();
  for (const auto& p : params) out.push_back(json{{"name", p.name}, {"shape", p.tensor->shape()}});
  return out;
}

void read_tensors(std::string_view bytes, std::size_t offset, const json& listed, const ParamList& params) {
  if (!listed.is_array() || listed.size() != params.size()) {
    throw FormatError("checkpoint: tensor manifest lists " + std::to_string(listed.size()) + " tensors, model has " +
                      std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto name = listed[i].at("name").get<std::string>();
    const auto shape = listed[i].at("shape").get<Shape>();
    if (name != params[i].name || shape != params[i].tensor->shape()) {
      throw FormatError("checkpoint: tensor " + std::to_string(i) + " is " + name + shape_to_string(shape) +
                        ", expected " + params[i].name + shape_to_string(params[i].tensor->shape()));
    }
    auto data = params[i].tensor->data();
    if (bytes.size() < offset + 8 * data.size()) throw FormatError("checkpoint: truncated data for " + name);
    for (auto& v : data) {
      const std::uint64_t raw = get_le(bytes, offset, 8);
      std::memcpy(&v, &raw, sizeof v);
      offset += 8;
    }
  }
  if (offset != bytes.size()) {
    throw FormatError("checkpoint: " + std::to_string(bytes.size() - offset) + " trailing bytes after tensor data");
  }
}

}  // namespace

std::string serialize_checkpoint(const ModelBundle& bundle) {
  json header;
  ParamList params;
  ModelBundle copy = bundle;
  if (auto* ms = std::get_if<MultiSiamBundle>(&copy)) {
    const auto& c = ms->model.config;
    header["kind"] = "multisiam";
    header["config"] = config_to_json(ms->config);
    header["model"] = json{{"vocab_size", c.vocab_size},
                           {"embed_dim", c.embed_dim},
                           {"hidden", c.hidden},
                           {"pooling", pooling_name(c.pooling)}};
    header["vocabulary"] = ms->vocab.tokens();
    header["categories"] = json::array();
    params = ms->model.params();
  } else {
    auto& sm = std::get<SmcdBundle>(copy);
    const auto& c = sm.model.config;
    header["kind"] = "smcd";
    header["config"] = config_to_json(sm.config);
    header["model"] = json{{"vocab_size", c.vocab_size},
                           {"embed_dim", c.embed_dim},
                           {"hidden", c.hidden},
                           {"num_categories", c.num_categories},
                           {"pooling", pooling_name(c.pooling)}};
    header["vocabulary"] = sm.vocab.tokens();
    header["categories"] = sm.categories;
    params = sm.model.params();
  }
  header["tensors"] = manifest(params);
  const std::string text = header.dump();

  std::string out(kCheckpointMagic, 4);
  put_u32(out, kCheckpointVersion);
  put_u64(out, text.size());
  out += text;
  for (const auto& p : params) {
    for (double v : p.tensor->data()) {
      std::uint64_t raw = 0;
      std::memcpy(&raw, &v, sizeof v);
      put_u64(out, raw);
    }
  }
  return out;
}

ModelBundle parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < 16) throw FormatError("checkpoint: file too short for the fixed header");
  if (bytes.substr(0, 4) != std::string_view(kCheckpointMagic, 4)) throw FormatError("checkpoint: bad magic bytes");
  const auto version = static_cast<std::uint32_t>(get_le(bytes, 4, 4));
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version) + " (supported: " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint64_t header_len = get_le(bytes, 8, 8);
  if (header_len > bytes.size() - 16) throw FormatError("checkpoint: truncated JSON header");
  const std::size_t data_offset = 16 + static_cast<std::size_t>(header_len);

  try {
    const json header = json::parse(bytes.substr(16, static_cast<std::size_t>(header_len)));
    const auto kind = header.at("kind").get<std::string>();
    const auto& model = header.at("model");
    auto vocab = Vocabulary::from_tokens(header.at("vocabulary").get<std::vector<std::string>>());
    const auto config = config_from_json(header.at("config"));
    const auto vocab_size = model.at("vocab_size").get<std::size_t>();
    if (vocab_size != vocab.size()) throw FormatError("checkpoint: vocabulary size disagrees with the embedding table");

    if (kind == "multisiam") {
      EncoderConfig ec{vocab_size, model.at("embed_dim").get<std::size_t>(), model.at("hidden").get<std::size_t>(),
                       parse_pooling(model.at("pooling").get<std::string>())};
      MultiSiamBundle b{empty_multisiam(ec), std::move(vocab), config};
      read_tensors(bytes, data_offset, header.at("tensors"), b.model.params());
      return b;
    }
    if (kind == "smcd") {
      SmcdConfig sc{vocab_size, model.at("embed_dim").get<std::size_t>(), model.at("hidden").get<std::size_t>(),
                    model.at("num_categories").get<std::size_t>(),
                    parse_pooling(model.at("pooling").get<std::string>())};
      SmcdBundle b{empty_smcd(sc), std::move(vocab), header.at("categories").get<std::vector<std::string>>(), config};
      if (b.categories.size() != sc.num_categories) throw FormatError("checkpoint: category map size mismatch");
      read_tensors(bytes, data_offset, header.at("tensors"), b.model.params());
      return b;
    }
    throw FormatError("checkpoint: unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: malformed header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const ModelBundle& bundle, const std::string& path) {
  const std::string bytes = serialize_checkpoint(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("error writing checkpoint '" + path + "'");
}

ModelBundle load_checkpoint(const std::string& path) {
  const std::string bytes = detail::read_file(path);
  try {
    return parse_checkpoint(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace multisiam
