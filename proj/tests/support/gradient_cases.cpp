#include "gradient_cases.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "fixtures.h"
#include "multisiam/multisiam.h"
#include "multisiam/siamese_baseline.h"
#include "multisiam/smcd.h"
#include "multisiam/triplet_loss.h"

namespace fixtures {
using namespace multisiam;

namespace {

constexpr double kKinkMargin = 1e-3;
constexpr double kNoiseFloor = 1e-6;
constexpr double kScale = 0.5;
constexpr double kSmcdScale = 1.5;
constexpr std::size_t kVocab = 12;
constexpr std::size_t kDim = 4;
constexpr std::size_t kSteps = 3;

double dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<std::uint8_t> prefix_mask(std::size_t rows, std::size_t steps, SeededRng& rng, bool allow_empty) {
  std::vector<std::uint8_t> mask(rows * steps, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t len = allow_empty ? rng.below(steps + 1) : 1 + rng.below(steps);
    for (std::size_t t = 0; t < len; ++t) mask[r * steps + t] = 1;
  }
  return mask;
}

template <typename Layer>
double check_layer(Layer& layer, Layer& grad, const std::function<double()>& loss, double h = 1e-5) {
  ParamList p, g;
  layer.append_params(p, "");
  grad.append_params(g, "");
  return check_params(p, g, loss, h);
}

GradientCase pool_case(std::uint64_t seed, Pooling pooling) {
  SeededRng rng(300 + seed);
  const std::size_t n = 1 + rng.below(3), steps = 1 + rng.below(4), h = 1 + rng.below(8);
  const Tensor x = random_tensor({n, steps, h}, rng);
  const auto mask = prefix_mask(n, steps, rng, false);
  const Tensor r = random_tensor({n, h}, rng);
  const Tensor dx = pool_sequence_backward(r, mask, steps, pooling);
  const ScalarFn f = [&](const Tensor& xv) { return dot(r, pool_sequence(xv, mask, pooling)); };
  return {finite_diff_check(f, x, dx), 0};
}

bool below_noise_floor(const ParamList& grads) {
  for (const auto& p : grads) {
    for (std::size_t i = 0; i < p.tensor->size(); ++i) {
      const double a = std::abs((*p.tensor)[i]);
      if (a > 0.0 && a < kNoiseFloor) return true;
    }
  }
  return false;
}

}  // namespace

GradientCase embedding_gradient_case(std::uint64_t seed) {
  SeededRng rng(seed);
  EmbeddingLayer layer = init_embedding(7, 1 + rng.below(8), rng, 0.5);
  const TokenBlock ids = random_tokens(1 + rng.below(3), 1 + rng.below(4), 7, rng);
  const Tensor r = random_tensor({ids.rows, ids.steps, layer.dim()}, rng);
  EmbeddingLayer grad = zeros_like(layer);
  embedding_backward(r, ids, grad);
  return {check_layer(layer, grad, [&] { return dot(r, embedding_forward(ids, layer)); }), 0};
}

GradientCase lstm_gradient_case(std::uint64_t seed) {
  SeededRng rng(200 + seed);
  const std::size_t n = 1 + rng.below(3), steps = 1 + rng.below(4);
  const std::size_t in = 1 + rng.below(8), h = 1 + rng.below(8);
  LstmLayer layer = init_lstm(in, h, rng, 0.5);
  const Tensor x = random_tensor({n, steps, in}, rng);
  const auto mask = prefix_mask(n, steps, rng, true);
  const Tensor r = random_tensor({n, steps, h}, rng);
  const auto out = lstm_forward(x, mask, layer);
  LstmLayer grad = zeros_like(layer);
  const Tensor dx = lstm_backward(r, out.cache, layer, grad);
  const double params =
      check_layer(layer, grad, [&] { return dot(r, lstm_forward(x, mask, layer).hidden); }, kRecurrentStep);
  const ScalarFn fx = [&](const Tensor& xv) { return dot(r, lstm_forward(xv, mask, layer).hidden); };
  return {std::max(params, finite_diff_check(fx, x, dx, kRecurrentStep)), 0};
}

GradientCase mean_pool_gradient_case(std::uint64_t seed) { return pool_case(seed, Pooling::kMean); }

GradientCase last_pool_gradient_case(std::uint64_t seed) { return pool_case(seed, Pooling::kLast); }

GradientCase dense_gradient_case(std::uint64_t seed) {
  SeededRng rng(400 + seed);
  const std::size_t n = 1 + rng.below(3), in = 1 + rng.below(8), out = 1 + rng.below(8);
  DenseLayer layer = init_dense(in, out, rng, 0.5);
  for (auto& b : layer.bias.data()) b = rng.uniform(-1, 1);
  const Tensor x = random_tensor({n, in}, rng);
  const Tensor r = random_tensor({n, out}, rng);
  DenseLayer grad = zeros_like(layer);
  const Tensor dx = dense_backward(r, x, layer, grad);
  const double params = check_layer(layer, grad, [&] { return dot(r, dense_forward(x, layer)); });
  const ScalarFn f = [&](const Tensor& xv) { return dot(r, dense_forward(xv, layer)); };
  return {std::max(params, finite_diff_check(f, x, dx)), 0};
}

GradientCase normalize_gradient_case(std::uint64_t seed) {
  SeededRng rng(500 + seed);
  const std::size_t n = 1 + rng.below(3), d = 1 + rng.below(8);
  const Tensor x = random_tensor({n, d}, rng);
  const Tensor r = random_tensor({n, d}, rng);
  const Tensor dx = l2_normalize_rows_backward(r, l2_normalize_rows(x));
  const ScalarFn f = [&](const Tensor& xv) { return dot(r, l2_normalize_rows(xv).rows); };
  return {finite_diff_check(f, x, dx), 0};
}

GradientCase cross_entropy_gradient_case(std::uint64_t seed) {
  SeededRng rng(seed);
  const std::size_t n = 1 + rng.below(6), c = 2 + rng.below(12);
  const Tensor logits = random_tensor({n, c}, rng);
  std::vector<std::int32_t> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(static_cast<std::int32_t>(rng.below(c)));
  const auto ce = cross_entropy(logits, labels);
  const ScalarFn f = [&](const Tensor& z) { return cross_entropy(z, labels).loss; };
  return {finite_diff_check(f, logits, ce.dlogits), 0};
}

GradientCase multisiam_gradient_case(std::uint64_t seed) {
  const TripletConfig cfg;
  GradientCase result;
  for (std::uint64_t attempt = 0;; ++attempt) {
    SeededRng rng(seed * 7919 + attempt);
    MultiSiamModel model = init_multisiam({kVocab, kDim, kDim, Pooling::kMean}, rng, kScale);
    const GroupedBatch batch = random_batch(2 + rng.below(2), 2 + rng.below(2), kSteps, kVocab, rng);
    const auto fwd = forward_grouped(model, batch);
    const auto loss = triplet_loss(fwd.embeddings.e, cfg);
    if (distance_to_kink(loss.breakdown, cfg) < kKinkMargin || loss.breakdown.loss == 0.0) {
      ++result.resamples;
      continue;
    }
    MultiSiamModel grad = backward_grouped(model, fwd.cache, loss.grad);
    result.max_error = check_params_multistep(model.params(), grad.params(), [&] {
      return triplet_loss(forward_grouped(model, batch).embeddings.e, cfg).breakdown.loss;
    });
    return result;
  }
}

GradientCase smcd_gradient_case(std::uint64_t seed) {
  const TripletConfig cfg;
  GradientCase result;
  for (std::uint64_t attempt = 0;; ++attempt) {
    SeededRng rng(seed * 104729 + attempt);
    const std::size_t categories = 2 + rng.below(3);
    SmcdModel model = init_smcd({kVocab, kDim, kDim, categories, Pooling::kMean}, rng, kSmcdScale);
    GroupedBatch batch = random_batch(2 + rng.below(2), 2 + rng.below(2), kSteps, kVocab, rng, kSteps);
    for (std::size_t b = 0; b < batch.batch_size; ++b) {
      const auto label = static_cast<std::int32_t>(rng.below(categories));
      for (std::size_t g = 0; g < batch.group_size; ++g) batch.category_labels.push_back(label);
    }
    const double lambda = rng.uniform(0.5, 2.0);
    const auto fwd = smcd_forward(model, batch);
    const auto loss = smcd_loss(fwd.output, batch.category_labels, cfg, lambda);
    const auto kink = triplet_loss(fwd.output.dup_embeddings.e, cfg);
    if (distance_to_kink(kink.breakdown, cfg) < kKinkMargin || kink.breakdown.loss == 0.0) {
      ++result.resamples;
      continue;
    }
    SmcdModel grad = smcd_backward(model, fwd.cache, loss.dlogits, loss.d_dup);
    if (below_noise_floor(grad.params())) {
      ++result.resamples;
      continue;
    }
    result.max_error = check_params_multistep(model.params(), grad.params(), [&] {
      return smcd_loss(smcd_forward(model, batch).output, batch.category_labels, cfg, lambda).total;
    });
    return result;
  }
}

GradientCase siamese_gradient_case(std::uint64_t seed) {
  const TripletConfig cfg;
  GradientCase result;
  for (std::uint64_t attempt = 0;; ++attempt) {
    SeededRng rng(seed * 6151 + attempt);
    MultiSiamModel model = init_multisiam({kVocab, kDim, kDim, Pooling::kMean}, rng, kScale);
    const GroupedBatch batch = random_batch(2 + rng.below(3), 2, kSteps, kVocab, rng);
    const auto kink = triplet_loss(forward_grouped(model, batch).embeddings.e, cfg);
    if (distance_to_kink(kink.breakdown, cfg) < kKinkMargin) {
      ++result.resamples;
      continue;
    }
    SiameseStep baseline = siamese_step(model, batch, cfg);
    result.max_error = check_params_multistep(model.params(), baseline.grad.params(),
                                    [&] { return siamese_step(model, batch, cfg).loss; });
    return result;
  }
}

GradientCase triplet_gradient_case(std::uint64_t seed, double step) {
  const TripletConfig cfg;
  GradientCase result;
  for (std::uint64_t attempt = 0;; ++attempt) {
    SeededRng rng(seed * 2053 + attempt);
    const std::size_t n = 2 + rng.below(5), g = 2 + rng.below(3), d = 2 + rng.below(7);
    const Tensor e = random_tensor({n, g, d}, rng);
    const auto loss = triplet_loss(e, cfg);
    if (distance_to_kink(loss.breakdown, cfg) < kKinkMargin) {
      ++result.resamples;
      continue;
    }
    const ScalarFn f = [&](const Tensor& x) { return triplet_loss(x, cfg).breakdown.loss; };
    result.max_error = finite_diff_check(f, e, loss.grad, step);
    return result;
  }
}

}  // namespace fixtures
