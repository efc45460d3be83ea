#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.h"
#include "gradient_cases.h"
#include "multisiam/errors.h"
#include "multisiam/siamese_baseline.h"
#include "multisiam/triplet_loss.h"

using namespace multisiam;

namespace {

Tensor grouped(std::initializer_list<std::initializer_list<std::initializer_list<double>>> values) {
  std::vector<double> data;
  std::size_t n = 0, g = 0, d = 0;
  for (const auto& group : values) {
    ++n;
    g = group.size();
    for (const auto& v : group) {
      d = v.size();
      data.insert(data.end(), v.begin(), v.end());
    }
  }
  return Tensor({n, g, d}, data);
}

}  // namespace

TEST(Cosine, Basics) {
  const std::vector<double> a = {1, 0}, b = {0, 2}, z = {0, 0}, c = {3, 0};
  EXPECT_EQ(cosine(a, b), 0.0);
  EXPECT_EQ(cosine(a, z), 0.0);
  EXPECT_DOUBLE_EQ(cosine(a, c), 1.0);
}

TEST(SlotMatrices, IdentityAndAllEqual) {
  const auto m = slot_matrices(grouped({{{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}}));
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0], Tensor::identity(2));
  const auto same = slot_matrices(grouped({{{1, 1}, {1, 1}, {1, 1}}, {{1, 1}, {1, 1}, {1, 1}}}));
  ASSERT_EQ(same.size(), 2u);
  for (const auto& slot : same)
    for (double v : slot.data()) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(TripletLoss, WellSeparatedIsZero) {
  const auto r = triplet_loss(grouped({{{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}}), {});
  EXPECT_EQ(r.breakdown.loss, 0.0);
  EXPECT_EQ(r.breakdown.dist_ap, Tensor({2}, {1, 1}));
  EXPECT_EQ(r.breakdown.closest_neg, Tensor({2}, {0, 0}));
}

TEST(TripletLoss, AllIdenticalGivesOne) {
  const auto r = triplet_loss(grouped({{{1, 2}, {1, 2}}, {{1, 2}, {1, 2}}}), {0.25});
  EXPECT_NEAR(r.breakdown.loss, 1.0, 1e-12);
  EXPECT_NEAR(r.breakdown.cost1[0] + r.breakdown.cost2[0], 0.5, 1e-12);
  EXPECT_NEAR(triplet_loss(grouped({{{1, 2}, {1, 2}}, {{1, 2}, {1, 2}}}), {0.0}).breakdown.loss, 0.0, 1e-12);
}

TEST(TripletLoss, Preconditions) {
  EXPECT_THROW(triplet_loss(Tensor({1, 2, 3}), {}), DimensionError);
  EXPECT_THROW(triplet_loss(Tensor({3, 1, 3}), {}), DimensionError);
}

TEST(TripletLoss, MatchesOracleAndInvariants) {
  SeededRng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(5), g = 2 + rng.below(3), d = 2 + rng.below(7);
    const Tensor e = fixtures::random_tensor({n, g, d}, rng);
    const double alpha = rng.uniform(0.0, 1.0);
    const auto r = triplet_loss(e, {alpha});
    EXPECT_NEAR(r.breakdown.loss, oracle::triplet_loss(fixtures::to_cube(e), alpha), 1e-12);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GE(r.breakdown.closest_neg[i], r.breakdown.mean_neg[i] - 1e-15);
      EXPECT_GE(r.breakdown.cost2[i], r.breakdown.cost1[i]);
      EXPECT_GE(r.breakdown.cost1[i], 0.0);
      sum += r.breakdown.cost1[i] + r.breakdown.cost2[i];
    }
    EXPECT_NEAR(sum, r.breakdown.loss, 1e-12);
  }
}

TEST(TripletLoss, ZeroIffHardestConditionHolds) {
  SeededRng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Tensor e = fixtures::random_tensor({3, 2, 2}, rng);
    const auto r = triplet_loss(e, {0.1});
    bool hard = true;
    for (std::size_t i = 0; i < 3; ++i) hard &= r.breakdown.dist_ap[i] >= r.breakdown.closest_neg[i] + 0.1;
    EXPECT_EQ(r.breakdown.loss == 0.0, hard);
  }
}

TEST(TripletLoss, PermutationInvariance) {
  SeededRng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4, g = 3, d = 5;
    const Tensor e = fixtures::random_tensor({n, g, d}, rng);
    std::vector<std::size_t> order = {0, 1, 2, 3};
    rng.shuffle(order);
    Tensor batch_perm({n, g, d}), slot_perm({n, g, d});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < g; ++k)
        for (std::size_t c = 0; c < d; ++c) {
          batch_perm.at(i, k, c) = e.at(order[i], k, c);
          slot_perm.at(i, k, c) = e.at(i, k == 0 ? 0 : (k == 1 ? 2 : 1), c);
        }
    const auto base = triplet_loss(e, {});
    EXPECT_NEAR(triplet_loss(batch_perm, {}).breakdown.loss, base.breakdown.loss, 1e-12);
    const auto swapped = triplet_loss(slot_perm, {});
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(swapped.breakdown.cost1[i], base.breakdown.cost1[i], 1e-12);
      EXPECT_NEAR(swapped.breakdown.cost2[i], base.breakdown.cost2[i], 1e-12);
    }
  }
}

TEST(TripletLoss, HardestNegativeTieTakesFirst) {
  // Anchor 0 sees the same similarity in both slots of group 1; the gradient
  // routes the max to slot 1 only.
  const Tensor e = grouped({{{1, 0}, {0.6, 0.8}, {0.6, 0.8}}, {{0, 1}, {0.8, 0.6}, {0.8, 0.6}}});
  const auto r = triplet_loss(e, {1.0});
  EXPECT_EQ(r.breakdown.closest_gap[0], 0.0);
  EXPECT_TRUE(r.grad.all_finite());
}

TEST(TripletLoss, GradientCheck) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = fixtures::triplet_gradient_case(seed);
    EXPECT_LE(c.max_error, 1e-5) << "seed " << seed;
  }
}

TEST(PairwiseBaseline, MatchesClassicOracleAndGroupLoss) {
  SeededRng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(5), d = 2 + rng.below(7);
    const Tensor e = fixtures::random_tensor({n, 2, d}, rng);
    Tensor anchors({n, d}), positives({n, d});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < d; ++c) {
        anchors.at(i, c) = e.at(i, 0, c);
        positives.at(i, c) = e.at(i, 1, c);
      }
    const double classic = oracle::pairwise_siamese_loss(fixtures::to_mat(anchors), fixtures::to_mat(positives), 0.25);
    EXPECT_NEAR(triplet_loss(e, {}).breakdown.loss, classic, 1e-12);
    // The baseline scores unit vectors with plain dot products.
    const Tensor a = l2_normalize_rows(anchors).rows, p = l2_normalize_rows(positives).rows;
    EXPECT_NEAR(pairwise_siamese_loss(a, p, {}).loss, classic, 1e-12);
  }
}

TEST(PairwiseBaseline, StepGradientCheck) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_LE(fixtures::siamese_gradient_case(seed).max_error, 1e-5) << "seed " << seed;
  }
}
