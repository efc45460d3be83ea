#pragma once

#include <cstdint>
#include <vector>

#include "multisiam/layers.h"

namespace multisiam {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

/// One bias-corrected Adam update. Moments are allocated on first use.
/// Throws NumericError naming the first tensor with a non-finite gradient,
/// before anything is modified.
void adam_step(const ParamList& params, const ParamList& grads, AdamState& state, double lr);

/// Plain gradient descent.
void sgd_step(const ParamList& params, const ParamList& grads, double lr);

/// Rescale all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
double clip_grad_norm(const ParamList& grads, double max_norm);

/// Throws NumericError if any gradient entry is NaN or infinite.
void check_finite(const ParamList& grads);

}  // namespace multisiam
