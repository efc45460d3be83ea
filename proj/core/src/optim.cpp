#include "multisiam/optim.h"

#include <cmath>

namespace multisiam {
namespace {

void check_mirror(const ParamList& params, const ParamList& grads) {
  if (params.size() != grads.size()) throw DimensionError("optimizer: parameter and gradient lists differ in length");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].tensor->shape() != grads[i].tensor->shape()) {
      throw DimensionError("optimizer: gradient for " + params[i].name + " has shape " +
                           shape_to_string(grads[i].tensor->shape()) + ", parameter has " +
                           shape_to_string(params[i].tensor->shape()));
    }
  }
}

}  // namespace

void check_finite(const ParamList& grads) {
  for (const auto& g : grads) {
    if (!g.tensor->all_finite()) throw NumericError("non-finite gradient in " + g.name);
  }
}

void adam_step(const ParamList& params, const ParamList& grads, AdamState& state, double lr) {
  check_mirror(params, grads);
  check_finite(grads);
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.tensor->shape());
      state.v.emplace_back(p.tensor->shape());
    }
  }
  if (state.m.size() != params.size()) throw DimensionError("adam_step: optimizer state belongs to another model");
  ++state.step;
  const double correction1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].tensor->data();
    const auto g = grads[i].tensor->data();
    auto m = state.m[i].data();
    auto v = state.v[i].data();
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
      v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      p[k] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

void sgd_step(const ParamList& params, const ParamList& grads, double lr) {
  check_mirror(params, grads);
  check_finite(grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].tensor->data();
    const auto g = grads[i].tensor->data();
    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= lr * g[k];
  }
}

double clip_grad_norm(const ParamList& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& g : grads)
    for (double x : g.tensor->data()) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (const auto& g : grads)
      for (auto& x : g.tensor->data()) x *= scale;
  }
  return norm;
}

}  // namespace multisiam
