#include "multisiam/config.h"

#include <stdexcept>

namespace multisiam {

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("invalid training config: " + what); };
  if (batch_size < 2) fail("batch_size must be at least 2");
  if (group_size < 1) fail("group_size must be positive");
  if (text_size < 1) fail("text_size must be positive");
  if (embed_dim < 1 || hidden < 1) fail("layer sizes must be positive");
  if (min_freq < 1) fail("min_freq must be at least 1");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (!(alpha >= 0.0)) fail("alpha must be non-negative");
  if (!(lambda_dup >= 0.0)) fail("lambda_dup must be non-negative");
  if (!(clip_norm >= 0.0)) fail("clip_norm must be non-negative");
  if (optimizer != "adam" && optimizer != "sgd") fail("optimizer must be 'adam' or 'sgd'");
}

std::string pooling_name(Pooling p) { return p == Pooling::kMean ? "mean" : "last"; }

Pooling parse_pooling(const std::string& name) {
  if (name == "mean") return Pooling::kMean;
  if (name == "last") return Pooling::kLast;
  throw std::invalid_argument("unknown pooling '" + name + "' (expected mean or last)");
}

}  // namespace multisiam
