#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "multisiam/layers.h"

namespace multisiam {

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 256;
  std::size_t group_size = 2;
  std::size_t text_size = 64;
  std::size_t embed_dim = 64;
  std::size_t hidden = 64;
  std::size_t min_freq = 2;
  double learning_rate = 1e-3;
  double alpha = 0.25;
  double lambda_dup = 1.0;
  double tau = 0.7;
  /// Global gradient-norm clip; 0 disables clipping.
  double clip_norm = 0.0;
  std::uint64_t seed = 1;
  std::string optimizer = "adam";  // "adam" or "sgd"
  bool qid_disjoint = true;
  Pooling pooling = Pooling::kMean;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

std::string pooling_name(Pooling p);
Pooling parse_pooling(const std::string& name);

}  // namespace multisiam
