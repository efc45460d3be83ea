#include "multisiam/smcd.h"

#include <algorithm>
#include <cmath>

namespace multisiam {

void SmcdModel::append_params(ParamList& out, const std::string& prefix) {
  embedding.append_params(out, prefix + "embedding.");
  trunk_lstm.append_params(out, prefix + "trunk_lstm.");
  cls_lstm.append_params(out, prefix + "cls_lstm.");
  cls_dense.append_params(out, prefix + "cls_dense.");
  dup_lstm.append_params(out, prefix + "dup_lstm.");
}

ParamList SmcdModel::params() {
  ParamList out;
  append_params(out, "");
  return out;
}

SmcdModel init_smcd(const SmcdConfig& config, SeededRng& rng, double scale) {
  if (config.num_categories < 2) throw std::invalid_argument("SMCD needs at least 2 categories");
  SmcdModel m;
  m.config = config;
  m.embedding = init_embedding(config.vocab_size, config.embed_dim, rng, scale);
  m.trunk_lstm = init_lstm(config.embed_dim, config.hidden, rng, scale);
  m.cls_lstm = init_lstm(config.hidden, config.hidden, rng, scale);
  m.cls_dense = init_dense(config.hidden, config.num_categories, rng, scale);
  m.dup_lstm = init_lstm(config.hidden, config.hidden, rng, scale);
  return m;
}

SmcdForward smcd_forward(const SmcdModel& model, const GroupedBatch& batch) {
  SmcdForward out;
  auto& c = out.cache;
  c.tokens = fold(batch);
  c.batch_size = batch.batch_size;
  c.group_size = batch.group_size;

  const Tensor embedded = embedding_forward(c.tokens, model.embedding);
  LstmOutput trunk = lstm_forward(embedded, c.tokens.mask, model.trunk_lstm);
  const Tensor& sequence = trunk.hidden;  // E: (B*G) x T x h

  LstmOutput cls = lstm_forward(sequence, c.tokens.mask, model.cls_lstm);
  c.cls_pooled = pool_sequence(cls.hidden, c.tokens.mask, model.config.pooling);
  out.output.logits = dense_forward(c.cls_pooled, model.cls_dense);
  out.output.probs = softmax_rows(out.output.logits);

  LstmOutput dup = lstm_forward(sequence, c.tokens.mask, model.dup_lstm);
  c.dup_normalized = l2_normalize_rows(pool_sequence(dup.hidden, c.tokens.mask, model.config.pooling));
  out.output.dup_embeddings.e = unfold(c.dup_normalized.rows, batch.batch_size, batch.group_size);
  out.output.dup_embeddings.degenerate = c.dup_normalized.degenerate;

  c.trunk = std::move(trunk.cache);
  c.cls = std::move(cls.cache);
  c.dup = std::move(dup.cache);
  return out;
}

CrossEntropy cross_entropy(const Tensor& logits, std::span<const std::int32_t> labels) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
    throw DimensionError("cross_entropy: logits " + shape_to_string(logits.shape()) + " vs " +
                         std::to_string(labels.size()) + " labels");
  }
  const std::size_t n = logits.dim(0), c = logits.dim(1);
  CrossEntropy out{0.0, Tensor(logits.shape())};
  if (n == 0) return out;
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= c) {
      throw DimensionError("cross_entropy: label " + std::to_string(label) + " at row " + std::to_string(i) +
                           " outside " + std::to_string(c) + " categories");
    }
    const auto z = logits.row(i);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    const double log_norm = mx + std::log(sum);
    out.loss += (log_norm - z[static_cast<std::size_t>(label)]) * scale;
    auto d = out.dlogits.row(i);
    for (std::size_t j = 0; j < c; ++j) d[j] = std::exp(z[j] - log_norm) * scale;
    d[static_cast<std::size_t>(label)] -= scale;
  }
  return out;
}

SmcdLoss smcd_loss(const SmcdOutput& output, std::span<const std::int32_t> labels, const TripletConfig& cfg,
                   double lambda_dup) {
  SmcdLoss out;
  auto ce = cross_entropy(output.logits, labels);
  out.ce = ce.loss;
  out.dlogits = std::move(ce.dlogits);
  const Tensor& e = output.dup_embeddings.e;
  out.d_dup = Tensor(e.shape());
  if (e.dim(0) >= 2 && e.dim(1) >= 2) {
    auto trip = triplet_loss(e, cfg);
    out.triplet = trip.breakdown.loss;
    if (lambda_dup != 0.0) {
      for (std::size_t i = 0; i < trip.grad.size(); ++i) out.d_dup[i] = lambda_dup * trip.grad[i];
    }
  }
  out.total = lambda_dup == 0.0 ? out.ce : out.ce + lambda_dup * out.triplet;
  return out;
}

SmcdModel smcd_backward(const SmcdModel& model, const SmcdCache& c, const Tensor& dlogits, const Tensor& d_dup) {
  SmcdModel grad = zeros_like(model);
  const auto& mask = c.tokens.mask;
  const std::size_t steps = c.tokens.steps;

  const Tensor dpooled_cls = dense_backward(dlogits, c.cls_pooled, model.cls_dense, grad.cls_dense);
  const Tensor dcls_hidden = pool_sequence_backward(dpooled_cls, mask, steps, model.config.pooling);
  Tensor dsequence = lstm_backward(dcls_hidden, c.cls, model.cls_lstm, grad.cls_lstm);

  const Tensor ddup_pooled = l2_normalize_rows_backward(fold_embeddings(d_dup), c.dup_normalized);
  const Tensor ddup_hidden = pool_sequence_backward(ddup_pooled, mask, steps, model.config.pooling);
  const Tensor dsequence_dup = lstm_backward(ddup_hidden, c.dup, model.dup_lstm, grad.dup_lstm);
  for (std::size_t i = 0; i < dsequence.size(); ++i) dsequence[i] += dsequence_dup[i];

  const Tensor dembedded = lstm_backward(dsequence, c.trunk, model.trunk_lstm, grad.trunk_lstm);
  embedding_backward(dembedded, c.tokens, grad.embedding);
  return grad;
}

}  // namespace multisiam
