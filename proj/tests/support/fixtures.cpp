#include "fixtures.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "multisiam/synthetic.h"

namespace fixtures {

using namespace multisiam;

Tensor random_tensor(const Shape& shape, SeededRng& rng, double lo, double hi) {
  Tensor t(shape);
  for (auto& x : t.data()) x = rng.uniform(lo, hi);
  return t;
}

oracle::Mat to_mat(const Tensor& t) {
  oracle::Mat m(t.dim(0), oracle::Vec(t.dim(1)));
  for (std::size_t i = 0; i < t.dim(0); ++i)
    for (std::size_t j = 0; j < t.dim(1); ++j) m[i][j] = t.at(i, j);
  return m;
}

oracle::Cube to_cube(const Tensor& t) {
  oracle::Cube c(t.dim(0), oracle::Mat(t.dim(1), oracle::Vec(t.dim(2))));
  for (std::size_t i = 0; i < t.dim(0); ++i)
    for (std::size_t g = 0; g < t.dim(1); ++g)
      for (std::size_t k = 0; k < t.dim(2); ++k) c[i][g][k] = t.at(i, g, k);
  return c;
}

Tensor from_mat(const oracle::Mat& m) {
  Tensor t({m.size(), m.empty() ? 0 : m[0].size()});
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t.at(i, j) = m[i][j];
  return t;
}

TokenBlock random_tokens(std::size_t rows, std::size_t steps, std::size_t vocab, SeededRng& rng,
                         std::size_t min_len) {
  TokenBlock block{rows, steps, std::vector<TokenId>(rows * steps, kPadId), std::vector<std::uint8_t>(rows * steps, 0)};
  std::set<std::vector<TokenId>> seen;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<TokenId> row;
    do {
      row.assign(steps, kPadId);
      const std::size_t len = min_len + rng.below(steps - min_len + 1);
      for (std::size_t t = 0; t < len; ++t) row[t] = static_cast<TokenId>(2 + rng.below(vocab - 2));
    } while (!seen.insert(row).second);
    for (std::size_t t = 0; t < steps; ++t) {
      block.ids[r * steps + t] = row[t];
      block.mask[r * steps + t] = row[t] != kPadId;
    }
  }
  return block;
}

GroupedBatch random_batch(std::size_t batch, std::size_t group, std::size_t steps, std::size_t vocab,
                          SeededRng& rng, std::size_t min_len) {
  const TokenBlock block = random_tokens(batch * group, steps, vocab, rng, min_len);
  GroupedBatch out;
  out.batch_size = batch;
  out.group_size = group;
  out.text_size = steps;
  out.ids = block.ids;
  out.token_mask = block.mask;
  return out;
}

double check_params(const ParamList& params, const ParamList& grads, const std::function<double()>& loss,
                    double h) {
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor* target = params[p].tensor;
    const Tensor original = *target;
    const ScalarFn f = [&](const Tensor& value) {
      *target = value;
      return loss();
    };
    worst = std::max(worst, finite_diff_check(f, original, *grads[p].tensor, h));
    *target = original;
  }
  return worst;
}

double check_params_multistep(const ParamList& params, const ParamList& grads, const std::function<double()>& loss,
                              const std::vector<double>& steps) {
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor* target = params[p].tensor;
    const Tensor original = *target;
    const Tensor& analytic = *grads[p].tensor;
    const ScalarFn f = [&](const Tensor& value) {
      *target = value;
      return loss();
    };
    std::vector<double> best(original.size(), std::numeric_limits<double>::infinity());
    for (double h : steps) {
      const Tensor numeric = numeric_gradient(f, original, h);
      for (std::size_t i = 0; i < best.size(); ++i) {
        const double a = analytic[i], g = numeric[i];
        const double err = std::abs(a - g) / std::max({std::abs(a), std::abs(g), 1e-8});
        best[i] = std::min(best[i], err);
      }
    }
    *target = original;
    for (std::size_t i = 0; i < best.size(); ++i) {
      worst = std::max(worst, best[i]);
    }
  }
  return worst;
}

MicroData micro_dataset(std::size_t categories, std::size_t groups, std::size_t texts, std::size_t group_size,
                        std::size_t text_size, std::uint64_t seed) {
  const auto synthetic = multisiam::generate_synthetic({categories, groups, texts, texts, seed});
  const auto csv = multisiam::parse_grouped_csv(multisiam::format_grouped_csv(synthetic.records));
  MicroData out;
  out.categories = csv.categories;
  out.groups = multisiam::collect_groups(csv);
  std::vector<std::vector<std::string>> corpus;
  for (const auto& r : csv.records) corpus.push_back(multisiam::tokenize(r.text));
  out.vocab = multisiam::build_vocab(corpus, 1);
  SeededRng rng(seed + 1);
  out.encoded = multisiam::encode_text_groups(out.groups, out.vocab, text_size, group_size, rng);
  return out;
}

std::string quora_tsv(std::size_t duplicates, std::size_t negatives, std::uint64_t seed) {
  static const std::vector<std::string> subjects = {"python", "java", "guitar", "piano", "chess", "coffee",
                                                    "tea", "running", "yoga", "london", "paris", "tokyo",
                                                    "bitcoin", "stocks", "marathon", "cooking", "baking", "drawing"};
  static const std::vector<std::string> asks = {"learn", "start", "improve at", "get better at", "practice"};
  SeededRng rng(seed);
  std::ostringstream out;
  out << "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\n";
  std::int64_t qid = 1;
  std::size_t id = 0;
  auto topic = [&] {
    return subjects[rng.below(subjects.size())] + " " + subjects[rng.below(subjects.size())] + " " +
           std::to_string(rng.below(50));
  };
  for (std::size_t i = 0; i < duplicates; ++i) {
    const std::string t = topic();
    const std::string& a = asks[rng.below(asks.size())];
    out << id++ << '\t' << qid << '\t' << qid + 1 << "\tHow do I " << a << " " << t << "?\tWhat is the best way to "
        << a << " " << t << "?\t1\n";
    qid += 2;
  }
  for (std::size_t i = 0; i < negatives; ++i) {
    out << id++ << '\t' << qid << '\t' << qid + 1 << "\tHow do I " << asks[rng.below(asks.size())] << " " << topic()
        << "?\tWhy is " << topic() << " popular?\t0\n";
    qid += 2;
  }
  return out.str();
}

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "multisiam_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
}

}  // namespace fixtures
