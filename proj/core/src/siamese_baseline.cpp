#include "multisiam/siamese_baseline.h"

#include <limits>

namespace multisiam {

PairwiseLoss pairwise_siamese_loss(const Tensor& anchors, const Tensor& positives, const TripletConfig& cfg) {
  if (anchors.shape() != positives.shape() || anchors.rank() != 2 || anchors.dim(0) < 2) {
    throw DimensionError("pairwise_siamese_loss: need matching N x d blocks with N >= 2, got " +
                         shape_to_string(anchors.shape()) + " and " + shape_to_string(positives.shape()));
  }
  const std::size_t n = anchors.dim(0);
  const Tensor scores = matmul(anchors, transpose(positives));
  Tensor dscores({n, n});
  PairwiseLoss out;
  for (std::size_t i = 0; i < n; ++i) {
    const double positive = scores.at(i, i);
    double sum = 0.0;
    double closest = -std::numeric_limits<double>::infinity();
    std::size_t closest_j = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum += scores.at(i, j);
      if (scores.at(i, j) > closest) {
        closest = scores.at(i, j);
        closest_j = j;
      }
    }
    const double mean = sum / static_cast<double>(n - 1);
    const double l1 = mean - positive + cfg.alpha;
    const double l2 = closest - positive + cfg.alpha;
    if (l1 > 0.0) {
      out.loss += l1;
      for (std::size_t j = 0; j < n; ++j) dscores.at(i, j) += j == i ? -1.0 : 1.0 / static_cast<double>(n - 1);
    }
    if (l2 > 0.0) {
      out.loss += l2;
      dscores.at(i, i) -= 1.0;
      dscores.at(i, closest_j) += 1.0;
    }
  }
  out.d_anchors = matmul(dscores, positives);
  out.d_positives = matmul(transpose(dscores), anchors);
  return out;
}

std::pair<TokenBlock, TokenBlock> split_pair_batch(const GroupedBatch& pairs) {
  if (pairs.group_size != 2) throw DimensionError("split_pair_batch: group_size must be 2");
  const std::size_t n = pairs.batch_size, t = pairs.text_size;
  TokenBlock a{n, t, {}, {}}, p{n, t, {}, {}};
  for (std::size_t b = 0; b < n; ++b) {
    auto* dst = &a;
    for (std::size_t s = 0; s < 2; ++s, dst = &p) {
      const auto off = static_cast<std::ptrdiff_t>((b * 2 + s) * t);
      dst->ids.insert(dst->ids.end(), pairs.ids.begin() + off, pairs.ids.begin() + off + static_cast<std::ptrdiff_t>(t));
      dst->mask.insert(dst->mask.end(), pairs.token_mask.begin() + off,
                       pairs.token_mask.begin() + off + static_cast<std::ptrdiff_t>(t));
    }
  }
  return {std::move(a), std::move(p)};
}

SiameseStep siamese_step(const MultiSiamModel& model, const GroupedBatch& pairs, const TripletConfig& cfg) {
  const auto [anchor_tokens, positive_tokens] = split_pair_batch(pairs);
  EncoderCache anchor_cache, positive_cache;
  const Tensor anchors = encode_block(model, anchor_tokens, &anchor_cache);
  const Tensor positives = encode_block(model, positive_tokens, &positive_cache);
  const PairwiseLoss loss = pairwise_siamese_loss(anchors, positives, cfg);
  SiameseStep out{loss.loss, zeros_like(model)};
  encode_block_backward(model, anchor_cache, loss.d_anchors, out.grad);
  encode_block_backward(model, positive_cache, loss.d_positives, out.grad);
  return out;
}

}  // namespace multisiam
