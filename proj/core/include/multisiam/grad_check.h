#pragma once

#include <functional>

#include "multisiam/tensor.h"

namespace multisiam {

using ScalarFn = std::function<double(const Tensor&)>;

/// Largest per-coordinate relative error between `analytic_grad` and central
/// differences of `f` around `x`. The denominator is max(|a|, |g|, 1e-8).
/// Throws NumericError if `f` returns a non-finite value.
double finite_diff_check(const ScalarFn& f, const Tensor& x, const Tensor& analytic_grad,
                         double h = 1e-5);

/// Central-difference gradient of `f` at `x`.
Tensor numeric_gradient(const ScalarFn& f, const Tensor& x, double h = 1e-5);

}  // namespace multisiam
