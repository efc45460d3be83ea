#include "cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "multisiam/batching.h"
#include "multisiam/checkpoint.h"
#include "multisiam/datasets.h"
#include "multisiam/grouping.h"
#include "multisiam/synthetic.h"
#include "multisiam/training.h"

namespace multisiam::cli {
namespace {

using json = nlohmann::ordered_json;

struct Options {
  std::string data;
  std::string format = "auto";
  std::string out;
  std::string model;
  std::string input;
  std::string metrics;
  std::string report;
  std::string test_out;
  TrainConfig train;
  double train_ratio = 0.9;
  std::optional<std::size_t> extra_negatives;
  std::optional<std::size_t> max_train;
  std::optional<std::size_t> max_test_duplicates;
  bool no_qid_disjoint = false;
  bool summary = false;
  bool table = false;
  std::string pooling = "mean";
  // gen-synthetic
  std::size_t categories = 13;
  std::size_t groups = 201;
  std::size_t min_texts = 2;
  std::size_t max_texts = 4;
};

json typed(const std::string& value) {
  char* end = nullptr;
  const double d = std::strtod(value.c_str(), &end);
  if (!value.empty() && end == value.c_str() + value.size()) {
    if (value.find_first_of(".eE") == std::string::npos && value.front() != '-') {
      return json(static_cast<std::uint64_t>(std::strtoull(value.c_str(), nullptr, 10)));
    }
    return json(d);
  }
  return json(value);
}

// Every option of the subcommand with its effective value, for echoing into
// output artifacts.
json resolved_config(const CLI::App& sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_type_size() == 0) {
        cfg[name] = true;
      } else {
        cfg[name] = typed(res.front());
      }
    } else if (opt->get_type_size() == 0) {
      cfg[name] = false;
    } else {
      const std::string def = opt->get_default_str();
      cfg[name] = def.empty() ? json(nullptr) : typed(def);
    }
  }
  return cfg;
}

void write_text(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write '" + path + "'");
  file << content;
  if (!file) throw DataError("error writing '" + path + "'");
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

bool is_quora(const Options& o) {
  if (o.format == "quora") return true;
  if (o.format == "grouped") return false;
  if (o.format != "auto") throw std::invalid_argument("--format must be auto, quora or grouped");
  return std::filesystem::path(o.data).extension() == ".tsv";
}

std::vector<std::vector<std::string>> tokenized(const std::vector<std::string>& texts) {
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(texts.size());
  for (const auto& t : texts) corpus.push_back(tokenize(t));
  return corpus;
}

SeededRng data_rng(std::uint64_t seed) { return SeededRng(seed ^ 0x5851f42d4c957f2dULL); }

std::vector<EncodedText> encode_all(const std::vector<std::string>& texts, const Vocabulary& vocab,
                                    std::size_t text_size) {
  std::vector<EncodedText> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(encode_text(t, vocab, text_size));
  return out;
}

json metrics_to_json(const std::vector<EpochMetrics>& metrics) {
  json arr = json::array();
  for (const auto& m : metrics) arr.push_back(json::parse(metrics_json_line(m)));
  return arr;
}

double mean_seconds_per_step(const std::vector<EpochMetrics>& metrics) {
  double total = 0.0;
  std::size_t steps = 0;
  for (const auto& m : metrics) {
    total += m.seconds_per_step * static_cast<double>(m.steps);
    steps += m.steps;
  }
  return steps == 0 ? 0.0 : total / static_cast<double>(steps);
}

class MetricsFile {
 public:
  explicit MetricsFile(const std::string& path) {
    if (path.empty()) return;
    file_.open(path, std::ios::trunc);
    if (!file_) throw DataError("cannot write metrics file '" + path + "'");
  }
  MetricsSink sink() {
    return [this](const EpochMetrics& m) {
      if (file_.is_open()) file_ << metrics_json_line(m) << '\n' << std::flush;
    };
  }

 private:
  std::ofstream file_;
};

// ---------------------------------------------------------------------------

json cmd_build_vocab(const Options& o) {
  std::vector<std::string> texts;
  if (is_quora(o)) {
    for (const auto& r : load_quora_tsv(o.data).records) {
      texts.push_back(r.q1);
      texts.push_back(r.q2);
    }
  } else {
    for (const auto& r : load_grouped_csv(o.data).records) texts.push_back(r.text);
  }
  const Vocabulary vocab = build_vocab(tokenized(texts), o.train.min_freq);
  return json{{"size", vocab.size()}, {"tokens", vocab.tokens()}};
}

json cmd_gen_synthetic(const Options& o, std::ostream& out) {
  const auto ds = generate_synthetic(SyntheticConfig{o.categories, o.groups, o.min_texts, o.max_texts, o.train.seed});
  write_text(o.out, format_grouped_csv(ds.records), out);
  std::vector<std::string> cats(default_categories().begin(),
                                default_categories().begin() + static_cast<std::ptrdiff_t>(o.categories));
  return json{{"groups", ds.groups},
              {"texts", ds.texts},
              {"group_size", o.train.group_size},
              {"texts_after_padding", ds.padded_texts(o.train.group_size)},
              {"padding_added", ds.padded_texts(o.train.group_size) >= ds.texts
                                    ? ds.padded_texts(o.train.group_size) - ds.texts
                                    : 0},
              {"categories", cats}};
}

struct PreparedMetricData {
  Vocabulary vocab;
  std::vector<EncodedGroup> groups;
  std::vector<EncodedPair> test;
  std::vector<PairRecord> test_records;
  json info = json::object();
};

PreparedMetricData prepare_metric_data(const Options& o) {
  PreparedMetricData p;
  auto rng = data_rng(o.train.seed);
  if (is_quora(o)) {
    const auto data = load_quora_tsv(o.data);
    const std::size_t dups = data.duplicate_count();
    const auto n_train = static_cast<std::size_t>(std::floor(o.train_ratio * static_cast<double>(dups)));
    std::size_t held_out = dups - n_train;
    if (o.max_test_duplicates) held_out = std::min(held_out, *o.max_test_duplicates);
    const std::size_t negatives = o.extra_negatives.value_or(held_out);
    auto split = split_quora(data.records, o.train_ratio, negatives, rng);
    split = reduce_split(std::move(split), o.max_train.value_or(split.train.size()),
                         o.max_test_duplicates.value_or(split.test_duplicates));
    std::vector<std::string> texts;
    for (const auto& r : split.train) {
      texts.push_back(r.q1);
      texts.push_back(r.q2);
    }
    p.vocab = build_vocab(tokenized(texts), o.train.min_freq);
    p.groups = encode_pair_groups(split.train, p.vocab, o.train.text_size);
    p.test = encode_pairs(split.test, p.vocab, o.train.text_size);
    p.test_records = split.test;
    p.info = json{{"records", data.records.size()},
                  {"skipped_rows", data.skipped_rows},
                  {"duplicates", dups},
                  {"train_pairs", split.train.size()},
                  {"test_duplicates", split.test_duplicates},
                  {"test_negatives", split.test.size() - split.test_duplicates}};
  } else {
    const auto csv = load_grouped_csv(o.data);
    const auto groups = collect_groups(csv);
    std::vector<std::string> texts;
    for (const auto& r : csv.records) texts.push_back(r.text);
    p.vocab = build_vocab(tokenized(texts), o.train.min_freq);
    p.groups = encode_text_groups(groups, p.vocab, o.train.text_size, o.train.group_size, rng);
    p.info = json{{"records", csv.records.size()}, {"groups", groups.size()}};
  }
  p.info["vocab_size"] = p.vocab.size();
  return p;
}

std::string summary_table(const std::vector<std::array<std::string, 3>>& rows) {
  std::ostringstream s;
  s << std::left << std::setw(12) << "Model" << std::setw(12) << "Accuracy" << "CPU Time\n";
  for (const auto& r : rows) s << std::setw(12) << r[0] << std::setw(12) << r[1] << r[2] << '\n';
  return s.str();
}

std::string fmt(double v, int precision) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

json cmd_train_multisiam(const Options& o, std::ostream& out, std::string& table) {
  auto data = prepare_metric_data(o);
  MetricsFile metrics(o.metrics);
  const auto* validation = data.test.empty() ? nullptr : &data.test;
  auto result = train_multisiam(data.groups, data.vocab.size(), o.train, validation, metrics.sink());
  if (!o.out.empty()) save_checkpoint(MultiSiamBundle{result.model, data.vocab, o.train}, o.out);
  if (!o.test_out.empty()) {
    std::string tsv = "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\n";
    auto clean = [](std::string s) {
      std::replace(s.begin(), s.end(), '\t', ' ');
      std::replace(s.begin(), s.end(), '\n', ' ');
      if (s.find('"') != std::string::npos) {
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
      }
      return s;
    };
    for (std::size_t i = 0; i < data.test_records.size(); ++i) {
      const auto& r = data.test_records[i];
      tsv += std::to_string(i) + '\t' + std::to_string(r.qid1) + '\t' + std::to_string(r.qid2) + '\t' + clean(r.q1) +
             '\t' + clean(r.q2) + '\t' + (r.is_duplicate ? "1" : "0") + '\n';
    }
    write_text(o.test_out, tsv, out);
  }

  json report{{"data", data.info}, {"metrics", metrics_to_json(result.metrics)}};
  std::optional<double> accuracy;
  if (!result.metrics.empty() && result.metrics.back().accuracy) accuracy = result.metrics.back().accuracy;
  if (accuracy) report["accuracy"] = *accuracy;
  report["seconds_per_step"] = mean_seconds_per_step(result.metrics);
  if (!o.out.empty()) report["checkpoint"] = o.out;

  if (o.summary) {
    std::vector<std::array<std::string, 3>> rows;
    if (o.train.group_size == 2) {
      auto baseline = train_siamese(data.groups, data.vocab.size(), o.train, validation);
      std::optional<double> base_acc;
      if (!baseline.metrics.empty()) base_acc = baseline.metrics.back().accuracy;
      rows.push_back({"Siamese", base_acc ? fmt(*base_acc, 2) : "n/a",
                      fmt(mean_seconds_per_step(baseline.metrics), 4) + " s/step"});
      report["siamese"] = json{{"accuracy", base_acc ? json(*base_acc) : json(nullptr)},
                               {"seconds_per_step", mean_seconds_per_step(baseline.metrics)}};
    }
    rows.push_back({"MultiSiam", accuracy ? fmt(*accuracy, 2) : "n/a",
                    fmt(mean_seconds_per_step(result.metrics), 4) + " s/step"});
    table = summary_table(rows);
  }
  return report;
}

json cmd_train_smcd(const Options& o) {
  const auto csv = load_grouped_csv(o.data);
  const auto groups = collect_groups(csv);
  std::vector<std::string> texts;
  for (const auto& r : csv.records) texts.push_back(r.text);
  const Vocabulary vocab = build_vocab(tokenized(texts), o.train.min_freq);
  auto rng = data_rng(o.train.seed);
  const auto encoded = encode_text_groups(groups, vocab, o.train.text_size, o.train.group_size, rng);
  MetricsFile metrics(o.metrics);
  auto result = train_smcd(encoded, vocab.size(), csv.categories.size(), o.train, metrics.sink());
  if (!o.out.empty()) save_checkpoint(SmcdBundle{result.model, vocab, csv.categories, o.train}, o.out);
  json report{{"data", json{{"records", csv.records.size()},
                            {"groups", groups.size()},
                            {"texts_after_padding", groups.size() * o.train.group_size},
                            {"categories", csv.categories},
                            {"vocab_size", vocab.size()}}},
              {"metrics", metrics_to_json(result.metrics)}};
  if (!result.metrics.empty() && result.metrics.back().accuracy) report["accuracy"] = *result.metrics.back().accuracy;
  report["seconds_per_step"] = mean_seconds_per_step(result.metrics);
  if (!o.out.empty()) report["checkpoint"] = o.out;
  return report;
}

struct LoadedModel {
  ModelBundle bundle;
  const Vocabulary& vocab() const {
    return std::visit([](const auto& b) -> const Vocabulary& { return b.vocab; }, bundle);
  }
  const TrainConfig& config() const {
    return std::visit([](const auto& b) -> const TrainConfig& { return b.config; }, bundle);
  }
  const SmcdBundle& smcd(const char* command) const {
    const auto* s = std::get_if<SmcdBundle>(&bundle);
    if (s == nullptr) throw DataError(std::string(command) + " needs an SMCD checkpoint");
    return *s;
  }
};

Tensor embed_with(const LoadedModel& m, const std::vector<EncodedText>& texts) {
  if (const auto* ms = std::get_if<MultiSiamBundle>(&m.bundle)) return embed_texts(ms->model, texts);
  return smcd_infer(std::get<SmcdBundle>(m.bundle).model, texts).dup_embeddings;
}

json tensor_rows(const Tensor& t) {
  json rows = json::array();
  if (t.empty()) return rows;
  for (std::size_t i = 0; i < t.dim(0); ++i) {
    const auto r = t.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

json cmd_eval_pairs(const Options& o) {
  const LoadedModel m{load_checkpoint(o.model)};
  const auto* ms = std::get_if<MultiSiamBundle>(&m.bundle);
  if (ms == nullptr) throw DataError("eval-pairs needs a MultiSiam checkpoint");
  const auto data = load_quora_tsv(o.data);
  const auto pairs = encode_pairs(data.records, ms->vocab, ms->config.text_size);
  const double acc = pair_accuracy(ms->model, pairs, o.train.tau);
  return json{{"pairs", pairs.size()},
              {"duplicates", data.duplicate_count()},
              {"skipped_rows", data.skipped_rows},
              {"threshold", o.train.tau},
              {"accuracy", acc}};
}

json cmd_embed(const Options& o) {
  const LoadedModel m{load_checkpoint(o.model)};
  const auto texts = read_lines(o.input);
  const Tensor e = embed_with(m, encode_all(texts, m.vocab(), m.config().text_size));
  return json{{"count", texts.size()}, {"embeddings", tensor_rows(e)}};
}

json grouping_json(const GroupingResult& g, const std::vector<Classification>* categories, std::size_t n) {
  json clusters = json::array();
  for (const auto& c : g.clusters) clusters.push_back(c);
  json cats = json::array();
  for (std::size_t i = 0; i < n; ++i) cats.push_back(categories ? json((*categories)[i].name) : json(nullptr));
  return json{{"threshold", g.threshold}, {"clusters", clusters}, {"categories", cats}};
}

json cmd_group(const Options& o) {
  const LoadedModel m{load_checkpoint(o.model)};
  const auto texts = read_lines(o.input);
  const Tensor e = embed_with(m, encode_all(texts, m.vocab(), m.config().text_size));
  return grouping_json(group_by_threshold(e, o.train.tau), nullptr, texts.size());
}

json cmd_verify_group(const Options& o) {
  const LoadedModel m{load_checkpoint(o.model)};
  const auto texts = read_lines(o.input);
  if (texts.size() < 2) throw DataError("verify-group needs at least 2 texts");
  const auto verdict = verify_group(embed_with(m, encode_all(texts, m.vocab(), m.config().text_size)), o.train.tau);
  return json{{"threshold", o.train.tau}, {"is_duplicate_group", verdict.is_duplicate_group}, {"score", verdict.score}};
}

json cmd_classify(const Options& o) {
  const LoadedModel m{load_checkpoint(o.model)};
  const auto& s = m.smcd("classify");
  const auto texts = read_lines(o.input);
  const auto result = classify(s.model, s.categories, encode_all(texts, s.vocab, s.config.text_size));
  json rows = json::array();
  for (std::size_t i = 0; i < texts.size(); ++i) {
    rows.push_back(json{{"text", texts[i]}, {"category", result[i].name}, {"probability", result[i].probability}});
  }
  return json{{"predictions", rows}};
}

json cmd_group_and_classify(const Options& o, std::string& table) {
  const LoadedModel m{load_checkpoint(o.model)};
  const auto& s = m.smcd("group-and-classify");
  const auto texts = read_lines(o.input);
  const auto report = group_and_classify(s.model, s.categories, encode_all(texts, s.vocab, s.config.text_size), o.train.tau);
  if (o.table) table = format_report_table(report, texts);
  return grouping_json(report.grouping, &report.categories, texts.size());
}

void add_train_flags(CLI::App* sub, Options& o, std::size_t epochs, std::size_t batch, std::size_t group) {
  o.train.epochs = epochs;
  o.train.batch_size = batch;
  o.train.group_size = group;
  sub->add_option("--data", o.data, "Training data (Quora .tsv or grouped .csv)")->required()->check(CLI::ExistingFile);
  sub->add_option("--epochs", o.train.epochs, "Training epochs")->capture_default_str();
  sub->add_option("--batch-size", o.train.batch_size, "Groups per batch")->capture_default_str();
  sub->add_option("--group-size", o.train.group_size, "Texts per group")->capture_default_str();
  sub->add_option("--text-size", o.train.text_size, "Tokens per text")->capture_default_str();
  sub->add_option("--embed-dim", o.train.embed_dim, "Word embedding width")->capture_default_str();
  sub->add_option("--hidden", o.train.hidden, "LSTM hidden size")->capture_default_str();
  sub->add_option("--min-freq", o.train.min_freq, "Minimum token count for the vocabulary")->capture_default_str();
  sub->add_option("--lr", o.train.learning_rate, "Learning rate")->capture_default_str();
  sub->add_option("--margin", o.train.alpha, "Triplet margin")->capture_default_str();
  sub->add_option("--tau", o.train.tau, "Cosine threshold for evaluation")->capture_default_str();
  sub->add_option("--clip", o.train.clip_norm, "Clip gradient norm (0 = off)")->capture_default_str();
  sub->add_option("--optimizer", o.train.optimizer, "adam or sgd")->capture_default_str();
  sub->add_option("--pooling", o.pooling, "Sequence pooling: mean or last")->capture_default_str();
  sub->add_option("--seed", o.train.seed, "Random seed")->envname("MSIA_SEED")->capture_default_str();
  sub->add_option("--out", o.out, "Checkpoint path");
  sub->add_option("--metrics", o.metrics, "JSON-lines metrics path");
  sub->add_option("--report", o.report, "Write the JSON run report here instead of stdout");
  sub->add_option("--format", o.format, "Data format: auto, quora or grouped")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MultiSiam / SMCD training, evaluation and duplicate grouping", "msia"};
  app.require_subcommand(1);
  // One option set per subcommand so that defaults do not leak between them.
  std::map<const CLI::App*, Options> options;

  auto* build_vocab_cmd = app.add_subcommand("build-vocab", "Build a vocabulary from a dataset");
  Options& o_build_vocab_cmd = options[build_vocab_cmd];
  build_vocab_cmd->add_option("--data", o_build_vocab_cmd.data)->required()->check(CLI::ExistingFile);
  build_vocab_cmd->add_option("--min-freq", o_build_vocab_cmd.train.min_freq)->capture_default_str();
  build_vocab_cmd->add_option("--format", o_build_vocab_cmd.format)->capture_default_str();
  build_vocab_cmd->add_option("--out", o_build_vocab_cmd.out, "Output JSON path");

  auto* gen = app.add_subcommand("gen-synthetic", "Generate the synthetic grouped CSV dataset");
  Options& o_gen = options[gen];
  o_gen.train.group_size = 4;
  gen->add_option("--out", o_gen.out, "CSV path (stdout if omitted)");
  gen->add_option("--categories", o_gen.categories)->capture_default_str()->check(CLI::Range(1, 13));
  gen->add_option("--groups", o_gen.groups)->capture_default_str();
  gen->add_option("--min-texts", o_gen.min_texts)->capture_default_str();
  gen->add_option("--max-texts", o_gen.max_texts)->capture_default_str();
  gen->add_option("--group-size", o_gen.train.group_size, "Group size used for the padding report")->capture_default_str();
  gen->add_option("--seed", o_gen.train.seed)->envname("MSIA_SEED")->capture_default_str();
  gen->add_option("--report", o_gen.report, "JSON report path (stderr if omitted)");

  auto* tm = app.add_subcommand("train-multisiam", "Train a MultiSiam encoder with the group triplet loss");
  Options& o_tm = options[tm];
  add_train_flags(tm, o_tm, 10, 256, 2);
  tm->add_option("--train-ratio", o_tm.train_ratio, "Share of duplicate pairs used for training")->capture_default_str();
  tm->add_option("--extra-negatives", o_tm.extra_negatives, "Non-duplicate pairs added to the test set");
  tm->add_option("--max-train", o_tm.max_train, "Cap on training pairs");
  tm->add_option("--max-test-dup", o_tm.max_test_duplicates, "Cap on held-out duplicate pairs");
  tm->add_option("--test-out", o_tm.test_out, "Write the held-out test pairs as a Quora TSV");
  tm->add_flag("--no-qid-disjoint", o_tm.no_qid_disjoint, "Allow a question to appear twice in one batch");
  tm->add_flag("--summary", o_tm.summary, "Also train the pairwise Siamese baseline and print a comparison table");

  auto* ts = app.add_subcommand("train-smcd", "Train the SMCD classification + duplication model");
  Options& o_ts = options[ts];
  add_train_flags(ts, o_ts, 20, 16, 4);
  ts->add_option("--lambda-dup", o_ts.train.lambda_dup, "Weight of the triplet term")->capture_default_str();

  auto* ev = app.add_subcommand("eval-pairs", "Pair accuracy of a MultiSiam checkpoint on a Quora TSV");
  Options& o_ev = options[ev];
  ev->add_option("--model", o_ev.model)->required()->check(CLI::ExistingFile);
  ev->add_option("--data", o_ev.data)->required()->check(CLI::ExistingFile);
  ev->add_option("--tau", o_ev.train.tau)->capture_default_str();
  ev->add_option("--out", o_ev.out);

  auto add_inference = [&](const char* name, const char* help, bool with_tau) {
    auto* sub = app.add_subcommand(name, help);
    Options& o = options[sub];
    sub->add_option("--model", o.model)->required()->check(CLI::ExistingFile);
    sub->add_option("--input", o.input, "UTF-8 text file, one text per line")->required()->check(CLI::ExistingFile);
    if (with_tau) sub->add_option("--tau", o.train.tau)->capture_default_str();
    sub->add_option("--out", o.out);
    return sub;
  };
  auto* embed = add_inference("embed", "Embed texts with the reshape disabled", false);
  auto* group = add_inference("group", "Group texts into duplicate clusters", true);
  auto* verify = add_inference("verify-group", "Decide whether the input texts form one duplicate group", true);
  auto* cls = add_inference("classify", "Categorise texts with an SMCD checkpoint", false);
  auto* gc = add_inference("group-and-classify", "Group duplicates and categorise with an SMCD checkpoint", true);
  gc->add_flag("--table", options[gc].table, "Print a text table instead of JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  Options& o = options.at(sub);
  try {
    o.train.pooling = parse_pooling(o.pooling);
    o.train.qid_disjoint = !o.no_qid_disjoint;
    json result;
    std::string table;
    if (sub == build_vocab_cmd) {
      result = cmd_build_vocab(o);
    } else if (sub == gen) {
      result = cmd_gen_synthetic(o, out);
    } else if (sub == tm) {
      result = cmd_train_multisiam(o, out, table);
    } else if (sub == ts) {
      result = cmd_train_smcd(o);
    } else if (sub == ev) {
      result = cmd_eval_pairs(o);
    } else if (sub == embed) {
      result = cmd_embed(o);
    } else if (sub == group) {
      result = cmd_group(o);
    } else if (sub == verify) {
      result = cmd_verify_group(o);
    } else if (sub == cls) {
      result = cmd_classify(o);
    } else {
      result = cmd_group_and_classify(o, table);
    }

    json doc;
    doc["command"] = sub->get_name();
    doc["config"] = resolved_config(*sub);
    for (auto& [k, v] : result.items()) doc[k] = v;
    const std::string text = doc.dump(2) + "\n";

    const bool is_training = sub == tm || sub == ts;
    if (sub == gen) {
      // The CSV owns stdout when --out is omitted.
      if (!o.report.empty()) write_text(o.report, text, out);
      else if (o.out.empty()) err << text;
      else out << text;
    } else if (is_training) {
      if (!o.report.empty()) write_text(o.report, text, out);
      if (!table.empty()) out << table;
      else if (o.report.empty()) out << text;
    } else if (!table.empty()) {
      write_text(o.out, table, out);
    } else {
      write_text(o.out, text, out);
    }
    return kOk;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericAbort;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const DimensionError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace multisiam::cli
