#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "multisiam/batching.h"
#include "multisiam/config.h"
#include "multisiam/multisiam.h"
#include "multisiam/smcd.h"

namespace multisiam {

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // mean batch loss
  std::optional<double> ce;
  std::optional<double> triplet;
  std::optional<double> accuracy;
  double seconds_per_step = 0.0;
  std::size_t steps = 0;
};

/// {"epoch":..,"loss":..,["ce","triplet","accuracy"],"seconds_per_step":..}
std::string metrics_json_line(const EpochMetrics& m);

using MetricsSink = std::function<void(const EpochMetrics&)>;

template <typename Model>
struct TrainResult {
  Model model;
  std::vector<EpochMetrics> metrics;
};

/// Seeded epoch loop: shuffle and batch groups, forward_grouped, triplet loss,
/// backward, optimizer step. With `validation`, each epoch reports pair
/// accuracy at cfg.tau. Throws NumericError on a non-finite loss or gradient.
TrainResult<MultiSiamModel> train_multisiam(const std::vector<EncodedGroup>& groups, std::size_t vocab_size,
                                            const TrainConfig& cfg,
                                            const std::vector<EncodedPair>* validation = nullptr,
                                            const MetricsSink& sink = {});

/// Same loop with the two-tower pairwise baseline; groups must have size 2.
TrainResult<MultiSiamModel> train_siamese(const std::vector<EncodedGroup>& groups, std::size_t vocab_size,
                                          const TrainConfig& cfg,
                                          const std::vector<EncodedPair>* validation = nullptr,
                                          const MetricsSink& sink = {});

/// Joint cross-entropy + weighted triplet training. Reported accuracy is the
/// share of training rows classified correctly during the epoch.
TrainResult<SmcdModel> train_smcd(const std::vector<EncodedGroup>& groups, std::size_t vocab_size,
                                  std::size_t num_categories, const TrainConfig& cfg, const MetricsSink& sink = {});

/// Seconds per step of `steps` MultiSiam (G=2) or pairwise-baseline steps on
/// the same batch, after one warm-up step.
struct StepTiming {
  double multisiam_seconds = 0.0;
  double siamese_seconds = 0.0;
};
StepTiming time_training_steps(const MultiSiamModel& model, const GroupedBatch& pairs, const TrainConfig& cfg,
                               std::size_t steps);

}  // namespace multisiam
