#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "multisiam/batching.h"
#include "multisiam/layers.h"

namespace multisiam {

struct EncoderConfig {
  std::size_t vocab_size = 2;
  std::size_t embed_dim = 64;
  std::size_t hidden = 64;
  Pooling pooling = Pooling::kMean;
};

/// Shared sub-network: word embedding followed by one LSTM. The same
/// parameters encode every group slot because the batch is folded first.
struct MultiSiamModel {
  EncoderConfig config;
  EmbeddingLayer embedding;
  LstmLayer encoder;

  std::size_t embedding_size() const { return encoder.hidden_size(); }
  void append_params(ParamList& out, const std::string& prefix);
  ParamList params();
};

MultiSiamModel init_multisiam(const EncoderConfig& config, SeededRng& rng, double scale = kInitScale);

/// B x G x T ids to (B*G) x T, row index b*G + g.
TokenBlock fold(const GroupedBatch& batch);

/// (B*G) x d to B x G x d.
Tensor unfold(const Tensor& flat, std::size_t batch_size, std::size_t group_size);

/// B x G x d to (B*G) x d.
Tensor fold_embeddings(const Tensor& grouped);

/// Unit-norm embeddings; a zero-norm row is returned as zeros and flagged.
struct GroupedEmbeddings {
  Tensor e;  // B x G x d
  std::vector<bool> degenerate;

  std::size_t batch_size() const { return e.dim(0); }
  std::size_t group_size() const { return e.dim(1); }
};

struct EncoderCache {
  TokenBlock tokens;
  LstmCache lstm;
  NormalizedRows normalized;
};

/// Embedding -> LSTM -> pooling -> L2 normalisation over a flat token block.
Tensor encode_block(const MultiSiamModel& model, const TokenBlock& tokens, EncoderCache* cache = nullptr);
void encode_block_backward(const MultiSiamModel& model, const EncoderCache& cache, const Tensor& upstream,
                           MultiSiamModel& grad);

struct GroupedForward {
  GroupedEmbeddings embeddings;
  EncoderCache cache;
};

GroupedForward forward_grouped(const MultiSiamModel& model, const GroupedBatch& batch);

/// Inference with the reshape disabled: one embedding per text (n x d).
Tensor forward_flat(const MultiSiamModel& model, const std::vector<EncodedText>& texts);

/// Gradients for every parameter given dLoss/d(embeddings) of shape B x G x d.
MultiSiamModel backward_grouped(const MultiSiamModel& model, const EncoderCache& cache, const Tensor& upstream);

}  // namespace multisiam
