#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "multisiam/tensor.h"

namespace multisiam {

struct TripletConfig {
  double alpha = 0.25;  // margin between positive and negative similarity
};

/// u.v / (|u| |v|), clamped to [-1, 1]; 0 when either norm is below 1e-12.
double cosine(std::span<const double> u, std::span<const double> v);

/// For each non-anchor slot k in 1..G-1, an N x N matrix with
/// M_k[i][j] = cosine(e[i,0], e[j,k]). Diagonals hold positives.
std::vector<Tensor> slot_matrices(const Tensor& e);

/// Per-anchor terms of the loss.
///
/// For anchor i the positive score is the mean of M_k[i][i] over slots and the
/// negative pool is every M_k[i][j] with j != i. Pool entries are visited slot
/// by slot, j ascending within a slot; the hardest negative is the first
/// maximum in that order.
struct TripletBreakdown {
  Tensor dist_ap;
  Tensor mean_neg;
  Tensor closest_neg;
  Tensor cost1;  // max(-dist_ap + mean_neg + alpha, 0)
  Tensor cost2;  // max(-dist_ap + closest_neg + alpha, 0)
  double loss = 0.0;
  /// Gap between the largest and second-largest pool entry for each anchor
  /// (infinity when the pool has one entry).
  std::vector<double> closest_gap;
};

struct TripletResult {
  TripletBreakdown breakdown;
  Tensor grad;  // dLoss/de, N x G x d
};

/// Sum over anchors of the mean-negative and hardest-negative hinge costs.
/// `e` is N x G x d with N >= 2 and G >= 2. The gradient is the subgradient
/// that takes the zero branch at a hinge boundary and routes the max through
/// the first maximising entry.
TripletResult triplet_loss(const Tensor& e, const TripletConfig& cfg);

/// Smallest distance from any hinge argument or hardest-negative tie; finite
/// differences are only meaningful when this is comfortably positive.
double distance_to_kink(const TripletBreakdown& b, const TripletConfig& cfg);

}  // namespace multisiam
