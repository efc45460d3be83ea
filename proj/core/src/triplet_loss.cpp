#include "multisiam/triplet_loss.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace multisiam {
namespace {

constexpr double kMinNorm = 1e-12;

double norm(std::span<const double> u) {
  double sq = 0.0;
  for (double x : u) sq += x * x;
  return std::sqrt(sq);
}

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

// Accumulate scale * d cos(u, v) / du into du and scale * d cos / dv into dv.
void cosine_backward(std::span<const double> u, std::span<const double> v, double scale, std::span<double> du,
                     std::span<double> dv) {
  const double nu = norm(u), nv = norm(v);
  if (nu < kMinNorm || nv < kMinNorm || scale == 0.0) return;
  const double c = dot(u, v) / (nu * nv);
  const double inv = 1.0 / (nu * nv);
  for (std::size_t i = 0; i < u.size(); ++i) {
    du[i] += scale * (v[i] * inv - c * u[i] / (nu * nu));
    dv[i] += scale * (u[i] * inv - c * v[i] / (nv * nv));
  }
}

void check_grouped(const Tensor& e) {
  if (e.rank() != 3) throw DimensionError("triplet loss expects N x G x d embeddings, got " + shape_to_string(e.shape()));
  if (e.dim(0) < 2) throw DimensionError("triplet loss needs at least 2 groups to form negatives");
  if (e.dim(1) < 2) throw DimensionError("triplet loss needs group_size >= 2");
}

std::span<const double> slot(const Tensor& e, std::size_t i, std::size_t k) {
  const std::size_t d = e.dim(2);
  return e.data().subspan((i * e.dim(1) + k) * d, d);
}

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DimensionError("cosine: vectors of length " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  const double nu = norm(u), nv = norm(v);
  if (nu < kMinNorm || nv < kMinNorm) return 0.0;
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

std::vector<Tensor> slot_matrices(const Tensor& e) {
  check_grouped(e);
  const std::size_t n = e.dim(0), g = e.dim(1);
  std::vector<Tensor> mats;
  mats.reserve(g - 1);
  for (std::size_t k = 1; k < g; ++k) {
    Tensor m({n, n});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.at(i, j) = cosine(slot(e, i, 0), slot(e, j, k));
    mats.push_back(std::move(m));
  }
  return mats;
}

TripletResult triplet_loss(const Tensor& e, const TripletConfig& cfg) {
  if (cfg.alpha < 0.0) throw std::invalid_argument("triplet loss margin must be non-negative");
  const auto mats = slot_matrices(e);
  const std::size_t n = e.dim(0), g = e.dim(1), d = e.dim(2);
  const std::size_t slots = g - 1;
  const double pool_size = static_cast<double>(slots * (n - 1));

  TripletResult out;
  auto& b = out.breakdown;
  b.dist_ap = Tensor({n});
  b.mean_neg = Tensor({n});
  b.closest_neg = Tensor({n});
  b.cost1 = Tensor({n});
  b.cost2 = Tensor({n});
  b.closest_gap.assign(n, std::numeric_limits<double>::infinity());

  // dLoss/dM_k, accumulated per anchor and pushed through the cosines below.
  std::vector<Tensor> dmats(slots, Tensor({n, n}));

  for (std::size_t i = 0; i < n; ++i) {
    double ap = 0.0, neg_sum = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    double runner_up = -std::numeric_limits<double>::infinity();
    std::size_t best_k = 0, best_j = 0;
    for (std::size_t k = 0; k < slots; ++k) {
      ap += mats[k].at(i, i);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double s = mats[k].at(i, j);
        neg_sum += s;
        if (s > best) {
          runner_up = best;
          best = s;
          best_k = k;
          best_j = j;
        } else if (s > runner_up) {
          runner_up = s;
        }
      }
    }
    ap /= static_cast<double>(slots);
    const double mean = neg_sum / pool_size;
    const double arg1 = -ap + mean + cfg.alpha;
    const double arg2 = -ap + best + cfg.alpha;
    b.dist_ap[i] = ap;
    b.mean_neg[i] = mean;
    b.closest_neg[i] = best;
    b.cost1[i] = std::max(arg1, 0.0);
    b.cost2[i] = std::max(arg2, 0.0);
    b.closest_gap[i] = best - runner_up;

    const double w_ap = 1.0 / static_cast<double>(slots);
    if (arg1 > 0.0) {
      for (std::size_t k = 0; k < slots; ++k) {
        for (std::size_t j = 0; j < n; ++j) dmats[k].at(i, j) += (j == i) ? -w_ap : 1.0 / pool_size;
      }
    }
    if (arg2 > 0.0) {
      for (std::size_t k = 0; k < slots; ++k) dmats[k].at(i, i) -= w_ap;
      dmats[best_k].at(i, best_j) += 1.0;
    }
  }
  for (std::size_t i = 0; i < n; ++i) b.loss += b.cost1[i] + b.cost2[i];

  out.grad = Tensor({n, g, d});
  auto grad_slot = [&](std::size_t i, std::size_t k) { return out.grad.data().subspan((i * g + k) * d, d); };
  for (std::size_t k = 0; k < slots; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        cosine_backward(slot(e, i, 0), slot(e, j, k + 1), dmats[k].at(i, j), grad_slot(i, 0), grad_slot(j, k + 1));
      }
    }
  }
  return out;
}

double distance_to_kink(const TripletBreakdown& b, const TripletConfig& cfg) {
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < b.dist_ap.size(); ++i) {
    dist = std::min(dist, std::abs(-b.dist_ap[i] + b.mean_neg[i] + cfg.alpha));
    dist = std::min(dist, std::abs(-b.dist_ap[i] + b.closest_neg[i] + cfg.alpha));
    dist = std::min(dist, b.closest_gap[i]);
  }
  return dist;
}

}  // namespace multisiam
