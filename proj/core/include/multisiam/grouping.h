#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "multisiam/batching.h"
#include "multisiam/multisiam.h"
#include "multisiam/smcd.h"

namespace multisiam {

struct GroupingResult {
  /// Clusters ordered by smallest member; members ascending. Together they
  /// partition 0..n-1.
  std::vector<std::vector<std::size_t>> clusters;
  double threshold = 0.7;
};

/// Connected components of the graph with an edge wherever
/// cosine(e_i, e_j) > tau. Chains merge transitively.
GroupingResult group_by_threshold(const Tensor& e, double tau);

struct GroupVerdict {
  bool is_duplicate_group = false;
  double score = 0.0;  // mean pairwise cosine
};

/// Mean cosine over all g(g-1)/2 pairs; a duplicate group iff score > tau.
GroupVerdict verify_group(const Tensor& e, double tau);

/// Flat MultiSiam embeddings, computed in chunks of `chunk` texts.
Tensor embed_texts(const MultiSiamModel& model, const std::vector<EncodedText>& texts, std::size_t chunk = 256);

/// Fraction of pairs where (cosine > tau) matches the duplicate label.
double pair_accuracy_from_embeddings(const Tensor& a, const Tensor& b, const std::vector<bool>& labels, double tau);
double pair_accuracy(const MultiSiamModel& model, const std::vector<EncodedPair>& pairs, double tau);

struct Classification {
  std::size_t category = 0;
  std::string name;
  double probability = 0.0;
};

struct SmcdInference {
  Tensor probs;          // n x num_categories
  Tensor dup_embeddings; // n x h
};

SmcdInference smcd_infer(const SmcdModel& model, const std::vector<EncodedText>& texts, std::size_t chunk = 256);

/// Argmax of the softmax per text, first index on ties.
std::vector<Classification> classify(const SmcdModel& model, const std::vector<std::string>& categories,
                                     const std::vector<EncodedText>& texts);
std::vector<Classification> classify_probs(const Tensor& probs, const std::vector<std::string>& categories);

struct GroupAndClassifyReport {
  GroupingResult grouping;
  std::vector<Classification> categories;
};

GroupAndClassifyReport group_and_classify(const SmcdModel& model, const std::vector<std::string>& categories,
                                          const std::vector<EncodedText>& texts, double tau);

/// Plain-text table with one row per text: group id, text, category.
std::string format_report_table(const GroupAndClassifyReport& report, const std::vector<std::string>& texts);

}  // namespace multisiam
