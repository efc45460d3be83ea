#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "multisiam/batching.h"
#include "multisiam/layers.h"
#include "multisiam/multisiam.h"
#include "multisiam/triplet_loss.h"

namespace multisiam {

struct SmcdConfig {
  std::size_t vocab_size = 2;
  std::size_t embed_dim = 64;
  std::size_t hidden = 64;
  std::size_t num_categories = 2;
  Pooling pooling = Pooling::kMean;
};

/// Shared embedding + trunk LSTM feeding a classification head
/// (LSTM -> pool -> dense -> softmax) and a duplication head
/// (LSTM -> pool -> L2 normalise -> unfold).
struct SmcdModel {
  SmcdConfig config;
  EmbeddingLayer embedding;
  LstmLayer trunk_lstm;
  LstmLayer cls_lstm;
  DenseLayer cls_dense;
  LstmLayer dup_lstm;

  void append_params(ParamList& out, const std::string& prefix);
  ParamList params();
};

SmcdModel init_smcd(const SmcdConfig& config, SeededRng& rng, double scale = kInitScale);

struct SmcdOutput {
  Tensor logits;  // (B*G) x num_categories
  Tensor probs;
  GroupedEmbeddings dup_embeddings;
};

struct SmcdCache {
  TokenBlock tokens;
  std::size_t batch_size = 0;
  std::size_t group_size = 0;
  LstmCache trunk;
  LstmCache cls;
  Tensor cls_pooled;
  LstmCache dup;
  NormalizedRows dup_normalized;
};

struct SmcdForward {
  SmcdOutput output;
  SmcdCache cache;
};

SmcdForward smcd_forward(const SmcdModel& model, const GroupedBatch& batch);

struct CrossEntropy {
  double loss = 0.0;
  Tensor dlogits;
};

/// Mean over rows of -log softmax(logits)[label], evaluated in log space.
CrossEntropy cross_entropy(const Tensor& logits, std::span<const std::int32_t> labels);

struct SmcdLoss {
  double total = 0.0;
  double ce = 0.0;
  double triplet = 0.0;
  Tensor dlogits;
  Tensor d_dup;  // B x G x h
};

/// total = ce + lambda_dup * triplet. The triplet term needs B >= 2 and G >= 2;
/// with lambda_dup == 0 it is still reported when computable.
SmcdLoss smcd_loss(const SmcdOutput& output, std::span<const std::int32_t> labels, const TripletConfig& cfg,
                   double lambda_dup);

/// Gradients of every parameter given upstream gradients for both heads.
SmcdModel smcd_backward(const SmcdModel& model, const SmcdCache& cache, const Tensor& dlogits, const Tensor& d_dup);

}  // namespace multisiam
