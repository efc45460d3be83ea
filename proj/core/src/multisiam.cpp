#include "multisiam/multisiam.h"

namespace multisiam {

void MultiSiamModel::append_params(ParamList& out, const std::string& prefix) {
  embedding.append_params(out, prefix + "embedding.");
  encoder.append_params(out, prefix + "encoder.");
}

ParamList MultiSiamModel::params() {
  ParamList out;
  append_params(out, "");
  return out;
}

MultiSiamModel init_multisiam(const EncoderConfig& config, SeededRng& rng, double scale) {
  MultiSiamModel model;
  model.config = config;
  model.embedding = init_embedding(config.vocab_size, config.embed_dim, rng, scale);
  model.encoder = init_lstm(config.embed_dim, config.hidden, rng, scale);
  return model;
}

TokenBlock fold(const GroupedBatch& batch) {
  return TokenBlock{batch.rows(), batch.text_size, batch.ids, batch.token_mask};
}

Tensor unfold(const Tensor& flat, std::size_t batch_size, std::size_t group_size) {
  if (flat.rank() != 2 || flat.dim(0) != batch_size * group_size) {
    throw DimensionError("unfold: " + shape_to_string(flat.shape()) + " has no " + std::to_string(batch_size) +
                         "x" + std::to_string(group_size) + " row split");
  }
  return flat.reshaped({batch_size, group_size, flat.dim(1)});
}

Tensor fold_embeddings(const Tensor& grouped) {
  if (grouped.rank() != 3) throw DimensionError("fold_embeddings: expected rank 3, got " + shape_to_string(grouped.shape()));
  return grouped.reshaped({grouped.dim(0) * grouped.dim(1), grouped.dim(2)});
}

Tensor encode_block(const MultiSiamModel& model, const TokenBlock& tokens, EncoderCache* cache) {
  const Tensor embedded = embedding_forward(tokens, model.embedding);
  LstmOutput lstm = lstm_forward(embedded, tokens.mask, model.encoder);
  const Tensor pooled = pool_sequence(lstm.hidden, tokens.mask, model.config.pooling);
  NormalizedRows normalized = l2_normalize_rows(pooled);
  Tensor out = normalized.rows;
  if (cache != nullptr) {
    cache->tokens = tokens;
    cache->lstm = std::move(lstm.cache);
    cache->normalized = std::move(normalized);
  }
  return out;
}

void encode_block_backward(const MultiSiamModel& model, const EncoderCache& cache, const Tensor& upstream,
                           MultiSiamModel& grad) {
  const Tensor dpooled = l2_normalize_rows_backward(upstream, cache.normalized);
  const Tensor dhidden =
      pool_sequence_backward(dpooled, cache.tokens.mask, cache.tokens.steps, model.config.pooling);
  const Tensor dembedded = lstm_backward(dhidden, cache.lstm, model.encoder, grad.encoder);
  embedding_backward(dembedded, cache.tokens, grad.embedding);
}

GroupedForward forward_grouped(const MultiSiamModel& model, const GroupedBatch& batch) {
  GroupedForward out;
  const Tensor flat = encode_block(model, fold(batch), &out.cache);
  out.embeddings.e = unfold(flat, batch.batch_size, batch.group_size);
  out.embeddings.degenerate = out.cache.normalized.degenerate;
  return out;
}

Tensor forward_flat(const MultiSiamModel& model, const std::vector<EncodedText>& texts) {
  if (texts.empty()) return Tensor({0, model.embedding_size()});
  const auto grouped = forward_grouped(model, flat_batch(texts));
  return fold_embeddings(grouped.embeddings.e);
}

MultiSiamModel backward_grouped(const MultiSiamModel& model, const EncoderCache& cache, const Tensor& upstream) {
  MultiSiamModel grad = zeros_like(model);
  encode_block_backward(model, cache, fold_embeddings(upstream), grad);
  return grad;
}

}  // namespace multisiam
