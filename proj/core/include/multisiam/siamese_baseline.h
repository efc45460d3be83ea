#pragma once

#include "multisiam/multisiam.h"
#include "multisiam/triplet_loss.h"

namespace multisiam {

/// Classic two-tower Siamese formulation used as a timing and accuracy
/// baseline. The anchor and positive columns of a pair batch are encoded in two
/// separate passes through the shared encoder and scored with an N x N
/// anchor-by-positive similarity matrix.
struct PairwiseLoss {
  double loss = 0.0;
  Tensor d_anchors;    // N x d
  Tensor d_positives;  // N x d
};

/// Loss over unit-norm anchor and positive embeddings (N x d each).
PairwiseLoss pairwise_siamese_loss(const Tensor& anchors, const Tensor& positives, const TripletConfig& cfg);

struct SiameseStep {
  double loss = 0.0;
  MultiSiamModel grad;
};

/// Forward and backward for a batch with group_size 2.
SiameseStep siamese_step(const MultiSiamModel& model, const GroupedBatch& pairs, const TripletConfig& cfg);

/// Split a group_size 2 batch into its slot-0 and slot-1 token blocks.
std::pair<TokenBlock, TokenBlock> split_pair_batch(const GroupedBatch& pairs);

}  // namespace multisiam
