#include "multisiam/grad_check.h"

#include <algorithm>
#include <cmath>

namespace multisiam {
namespace {

double checked_eval(const ScalarFn& f, const Tensor& x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw NumericError("finite_diff_check: objective returned a non-finite value");
  return v;
}

}  // namespace

Tensor numeric_gradient(const ScalarFn& f, const Tensor& x, double h) {
  Tensor grad(x.shape());
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = checked_eval(f, probe);
    probe[i] = orig - h;
    const double down = checked_eval(f, probe);
    probe[i] = orig;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double finite_diff_check(const ScalarFn& f, const Tensor& x, const Tensor& analytic_grad, double h) {
  if (x.shape() != analytic_grad.shape()) {
    throw DimensionError("finite_diff_check: gradient shape " + shape_to_string(analytic_grad.shape()) +
                         " differs from input shape " + shape_to_string(x.shape()));
  }
  const Tensor numeric = numeric_gradient(f, x, h);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = analytic_grad[i];
    const double g = numeric[i];
    const double denom = std::max({std::abs(a), std::abs(g), 1e-8});
    worst = std::max(worst, std::abs(a - g) / denom);
  }
  return worst;
}

}  // namespace multisiam
