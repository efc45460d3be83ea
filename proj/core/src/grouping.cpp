#include "multisiam/grouping.h"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "multisiam/triplet_loss.h"

namespace multisiam {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller root wins, so each root is its component's smallest index.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

GroupingResult group_by_threshold(const Tensor& e, double tau) {
  GroupingResult result;
  result.threshold = tau;
  if (e.empty() && (e.rank() == 0 || e.dim(0) == 0)) return result;
  if (e.rank() != 2) throw DimensionError("group_by_threshold: expected n x d embeddings, got " + shape_to_string(e.shape()));
  const std::size_t n = e.dim(0);
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (cosine(e.row(i), e.row(j)) > tau) sets.unite(i, j);

  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] == n) {
      slot[root] = result.clusters.size();
      result.clusters.emplace_back();
    }
    result.clusters[slot[root]].push_back(i);
  }
  return result;
}

GroupVerdict verify_group(const Tensor& e, double tau) {
  if (e.rank() != 2 || e.dim(0) < 2) throw DimensionError("verify_group: need at least 2 embeddings");
  const std::size_t g = e.dim(0);
  double sum = 0.0;
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i + 1; j < g; ++j) sum += cosine(e.row(i), e.row(j));
  const double score = sum / static_cast<double>(g * (g - 1) / 2);
  return GroupVerdict{score > tau, score};
}

Tensor embed_texts(const MultiSiamModel& model, const std::vector<EncodedText>& texts, std::size_t chunk) {
  const std::size_t d = model.embedding_size();
  Tensor out({texts.size(), d});
  for (std::size_t start = 0; start < texts.size(); start += chunk) {
    const std::size_t end = std::min(texts.size(), start + chunk);
    const std::vector<EncodedText> part(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                        texts.begin() + static_cast<std::ptrdiff_t>(end));
    const Tensor e = forward_flat(model, part);
    std::copy(e.data().begin(), e.data().end(), out.data().begin() + static_cast<std::ptrdiff_t>(start * d));
  }
  return out;
}

double pair_accuracy_from_embeddings(const Tensor& a, const Tensor& b, const std::vector<bool>& labels, double tau) {
  if (labels.empty()) throw DataError("pair_accuracy: empty test set");
  if (a.shape() != b.shape() || a.dim(0) != labels.size()) {
    throw DimensionError("pair_accuracy: embeddings " + shape_to_string(a.shape()) + " / " +
                         shape_to_string(b.shape()) + " for " + std::to_string(labels.size()) + " labels");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = cosine(a.row(i), b.row(i)) > tau;
    correct += predicted == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double pair_accuracy(const MultiSiamModel& model, const std::vector<EncodedPair>& pairs, double tau) {
  if (pairs.empty()) throw DataError("pair_accuracy: empty test set");
  std::vector<EncodedText> left, right;
  std::vector<bool> labels;
  for (const auto& p : pairs) {
    left.push_back(p.a);
    right.push_back(p.b);
    labels.push_back(p.is_duplicate);
  }
  return pair_accuracy_from_embeddings(embed_texts(model, left), embed_texts(model, right), labels, tau);
}

SmcdInference smcd_infer(const SmcdModel& model, const std::vector<EncodedText>& texts, std::size_t chunk) {
  const std::size_t c = model.config.num_categories;
  const std::size_t h = model.dup_lstm.hidden_size();
  SmcdInference out{Tensor({texts.size(), c}), Tensor({texts.size(), h})};
  for (std::size_t start = 0; start < texts.size(); start += chunk) {
    const std::size_t end = std::min(texts.size(), start + chunk);
    const std::vector<EncodedText> part(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                        texts.begin() + static_cast<std::ptrdiff_t>(end));
    const auto fwd = smcd_forward(model, flat_batch(part));
    std::copy(fwd.output.probs.data().begin(), fwd.output.probs.data().end(),
              out.probs.data().begin() + static_cast<std::ptrdiff_t>(start * c));
    std::copy(fwd.output.dup_embeddings.e.data().begin(), fwd.output.dup_embeddings.e.data().end(),
              out.dup_embeddings.data().begin() + static_cast<std::ptrdiff_t>(start * h));
  }
  return out;
}

std::vector<Classification> classify_probs(const Tensor& probs, const std::vector<std::string>& categories) {
  std::vector<Classification> out;
  if (probs.empty()) return out;
  for (std::size_t i = 0; i < probs.dim(0); ++i) {
    const auto p = probs.row(i);
    const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    out.push_back(Classification{best, best < categories.size() ? categories[best] : std::to_string(best), p[best]});
  }
  return out;
}

std::vector<Classification> classify(const SmcdModel& model, const std::vector<std::string>& categories,
                                     const std::vector<EncodedText>& texts) {
  return classify_probs(smcd_infer(model, texts).probs, categories);
}

GroupAndClassifyReport group_and_classify(const SmcdModel& model, const std::vector<std::string>& categories,
                                          const std::vector<EncodedText>& texts, double tau) {
  const auto inference = smcd_infer(model, texts);
  return GroupAndClassifyReport{group_by_threshold(inference.dup_embeddings, tau),
                                classify_probs(inference.probs, categories)};
}

std::string format_report_table(const GroupAndClassifyReport& report, const std::vector<std::string>& texts) {
  std::size_t text_width = 5;
  for (const auto& t : texts) text_width = std::max(text_width, t.size());
  text_width = std::min<std::size_t>(text_width, 72);
  std::ostringstream out;
  auto line = [&](const std::string& id, const std::string& text, const std::string& cat) {
    std::string shown = text.size() > text_width ? text.substr(0, text_width - 3) + "..." : text;
    out << id << std::string(10 - std::min<std::size_t>(id.size(), 9), ' ') << shown
        << std::string(text_width + 2 - shown.size(), ' ') << cat << '\n';
  };
  line("Group ID", "Texts", "Categories");
  for (std::size_t c = 0; c < report.grouping.clusters.size(); ++c) {
    bool first = true;
    for (auto idx : report.grouping.clusters[c]) {
      const std::string cat = idx < report.categories.size() ? report.categories[idx].name : "";
      line(first ? std::to_string(c + 1) : "", idx < texts.size() ? texts[idx] : "", cat);
      first = false;
    }
  }
  return out.str();
}

}  // namespace multisiam
