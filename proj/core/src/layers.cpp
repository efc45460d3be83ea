#include "multisiam/layers.h"

#include <algorithm>
#include <cmath>

namespace multisiam {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw DimensionError(message);
}

void fill_uniform(Tensor& t, SeededRng& rng, double scale) {
  for (auto& v : t.data()) v = rng.uniform(-scale, scale);
}

void check_mask(std::span<const std::uint8_t> mask, std::size_t rows, std::size_t steps, const char* who) {
  require(mask.size() == rows * steps, std::string(who) + ": mask has " + std::to_string(mask.size()) +
                                           " entries, expected " + std::to_string(rows * steps));
}

}  // namespace

// ---------------------------------------------------------------------------
// Embedding

void EmbeddingLayer::zero_pad_row() {
  for (auto& v : table.row(kPadId)) v = 0.0;
}

void EmbeddingLayer::append_params(ParamList& out, const std::string& prefix) {
  out.push_back({prefix + "table", &table});
}

EmbeddingLayer init_embedding(std::size_t vocab_size, std::size_t dim, SeededRng& rng, double scale) {
  require(vocab_size >= 2, "embedding needs at least the PAD and UNK rows");
  EmbeddingLayer layer{Tensor({vocab_size, dim})};
  fill_uniform(layer.table, rng, scale);
  layer.zero_pad_row();
  return layer;
}

Tensor embedding_forward(const TokenBlock& ids, const EmbeddingLayer& layer) {
  const std::size_t d = layer.dim();
  const std::size_t vocab = layer.vocab_size();
  require(ids.ids.size() == ids.rows * ids.steps, "embedding_forward: id block size mismatch");
  Tensor out({ids.rows, ids.steps, d});
  for (std::size_t p = 0; p < ids.ids.size(); ++p) {
    const TokenId id = ids.ids[p];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
      throw DimensionError("embedding_forward: id " + std::to_string(id) + " at row " +
                           std::to_string(p / std::max<std::size_t>(ids.steps, 1)) + ", step " +
                           std::to_string(p % std::max<std::size_t>(ids.steps, 1)) + " outside vocabulary of " +
                           std::to_string(vocab));
    }
    if (id == kPadId) continue;
    const auto src = layer.table.row(static_cast<std::size_t>(id));
    std::copy(src.begin(), src.end(), out.data().begin() + static_cast<std::ptrdiff_t>(p * d));
  }
  return out;
}

void embedding_backward(const Tensor& upstream, const TokenBlock& ids, EmbeddingLayer& grad) {
  const std::size_t d = grad.dim();
  require(upstream.shape() == Shape{ids.rows, ids.steps, d},
          "embedding_backward: upstream " + shape_to_string(upstream.shape()) + " does not match ids " +
              shape_to_string({ids.rows, ids.steps, d}));
  for (std::size_t p = 0; p < ids.ids.size(); ++p) {
    const TokenId id = ids.ids[p];
    if (id == kPadId) continue;
    auto dst = grad.table.row(static_cast<std::size_t>(id));
    const double* src = upstream.data().data() + p * d;
    for (std::size_t k = 0; k < d; ++k) dst[k] += src[k];
  }
}

// ---------------------------------------------------------------------------
// LSTM

void LstmLayer::append_params(ParamList& out, const std::string& prefix) {
  out.push_back({prefix + "weights", &weights});
  out.push_back({prefix + "bias", &bias});
}

LstmLayer init_lstm(std::size_t input_size, std::size_t hidden_size, SeededRng& rng, double scale) {
  require(hidden_size >= 1, "lstm hidden size must be positive");
  LstmLayer layer{Tensor({4 * hidden_size, input_size + hidden_size}), Tensor({4 * hidden_size})};
  fill_uniform(layer.weights, rng, scale);
  for (std::size_t u = hidden_size; u < 2 * hidden_size; ++u) layer.bias[u] = 1.0;
  return layer;
}

LstmOutput lstm_forward(const Tensor& x, std::span<const std::uint8_t> mask, const LstmLayer& layer) {
  require(x.rank() == 3, "lstm_forward: input must be rows x steps x features, got " + shape_to_string(x.shape()));
  const std::size_t n = x.dim(0), steps = x.dim(1), in = x.dim(2);
  const std::size_t h = layer.hidden_size();
  require(in == layer.input_size(), "lstm_forward: input width " + std::to_string(in) + " but layer expects " +
                                        std::to_string(layer.input_size()));
  check_mask(mask, n, steps, "lstm_forward");

  LstmOutput out;
  auto& c = out.cache;
  c.rows = n;
  c.steps = steps;
  c.hidden = h;
  c.input = x;
  c.mask.assign(mask.begin(), mask.end());
  c.gates.assign(steps * n * 4 * h, 0.0);
  c.cells.assign((steps + 1) * n * h, 0.0);
  c.hiddens.assign((steps + 1) * n * h, 0.0);
  c.cell_tanh.assign(steps * n * h, 0.0);
  out.hidden = Tensor({n, steps, h});

  const std::size_t width = in + h;
  const double* w = layer.weights.data().data();
  const double* b = layer.bias.data().data();
  std::vector<double> concat(width);

  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t r = 0; r < n; ++r) {
      const double* h_prev = &c.hiddens[(t * n + r) * h];
      const double* c_prev = &c.cells[(t * n + r) * h];
      double* h_next = &c.hiddens[((t + 1) * n + r) * h];
      double* c_next = &c.cells[((t + 1) * n + r) * h];
      if (mask[r * steps + t] == 0) {
        std::copy(h_prev, h_prev + h, h_next);
        std::copy(c_prev, c_prev + h, c_next);
      } else {
        const double* xt = x.data().data() + (r * steps + t) * in;
        std::copy(xt, xt + in, concat.begin());
        std::copy(h_prev, h_prev + h, concat.begin() + static_cast<std::ptrdiff_t>(in));
        double* gate = &c.gates[(t * n + r) * 4 * h];
        for (std::size_t u = 0; u < 4 * h; ++u) {
          const double* wu = w + u * width;
          double z = b[u];
          for (std::size_t k = 0; k < width; ++k) z += wu[k] * concat[k];
          gate[u] = (u >= 2 * h && u < 3 * h) ? std::tanh(z) : sigmoid(z);
        }
        double* ct = &c.cell_tanh[(t * n + r) * h];
        for (std::size_t j = 0; j < h; ++j) {
          const double ig = gate[j], fg = gate[h + j], gg = gate[2 * h + j], og = gate[3 * h + j];
          c_next[j] = fg * c_prev[j] + ig * gg;
          ct[j] = std::tanh(c_next[j]);
          h_next[j] = og * ct[j];
        }
      }
      std::copy(h_next, h_next + h, out.hidden.data().begin() + static_cast<std::ptrdiff_t>((r * steps + t) * h));
    }
  }
  return out;
}

Tensor lstm_backward(const Tensor& upstream, const LstmCache& c, const LstmLayer& layer, LstmLayer& grad) {
  const std::size_t n = c.rows, steps = c.steps, h = c.hidden;
  const std::size_t in = layer.input_size();
  require(upstream.shape() == Shape{n, steps, h}, "lstm_backward: upstream " + shape_to_string(upstream.shape()) +
                                                       " does not match cache " + shape_to_string({n, steps, h}));
  require(grad.weights.shape() == layer.weights.shape() && grad.bias.shape() == layer.bias.shape(),
          "lstm_backward: gradient buffers do not mirror the layer");
  require(layer.hidden_size() == h && c.input.dim(2) == in, "lstm_backward: cache was produced by another layer");

  const std::size_t width = in + h;
  const double* w = layer.weights.data().data();
  double* dw = grad.weights.data().data();
  double* db = grad.bias.data().data();

  Tensor dx({n, steps, in});
  std::vector<double> dh_next(n * h, 0.0), dc_next(n * h, 0.0);
  std::vector<double> dz(4 * h), dconcat(width), concat(width);

  for (std::size_t t = steps; t-- > 0;) {
    for (std::size_t r = 0; r < n; ++r) {
      double* dh = &dh_next[r * h];
      double* dc = &dc_next[r * h];
      const double* up = upstream.data().data() + (r * steps + t) * h;
      for (std::size_t j = 0; j < h; ++j) dh[j] += up[j];
      // A masked step is an identity on (h, c): gradients pass straight through.
      if (c.mask[r * steps + t] == 0) continue;

      const double* gate = &c.gates[(t * n + r) * 4 * h];
      const double* ct = &c.cell_tanh[(t * n + r) * h];
      const double* c_prev = &c.cells[(t * n + r) * h];
      for (std::size_t j = 0; j < h; ++j) {
        const double ig = gate[j], fg = gate[h + j], gg = gate[2 * h + j], og = gate[3 * h + j];
        const double dct = dc[j] + dh[j] * og * (1.0 - ct[j] * ct[j]);
        dz[j] = dct * gg * ig * (1.0 - ig);
        dz[h + j] = dct * c_prev[j] * fg * (1.0 - fg);
        dz[2 * h + j] = dct * ig * (1.0 - gg * gg);
        dz[3 * h + j] = dh[j] * ct[j] * og * (1.0 - og);
        dc[j] = dct * fg;
      }

      const double* xt = c.input.data().data() + (r * steps + t) * in;
      std::copy(xt, xt + in, concat.begin());
      const double* h_prev = &c.hiddens[(t * n + r) * h];
      std::copy(h_prev, h_prev + h, concat.begin() + static_cast<std::ptrdiff_t>(in));
      std::fill(dconcat.begin(), dconcat.end(), 0.0);
      for (std::size_t u = 0; u < 4 * h; ++u) {
        const double g = dz[u];
        if (g == 0.0) continue;
        db[u] += g;
        double* dwu = dw + u * width;
        const double* wu = w + u * width;
        for (std::size_t k = 0; k < width; ++k) {
          dwu[k] += g * concat[k];
          dconcat[k] += g * wu[k];
        }
      }
      double* dxt = dx.data().data() + (r * steps + t) * in;
      for (std::size_t k = 0; k < in; ++k) dxt[k] = dconcat[k];
      for (std::size_t j = 0; j < h; ++j) dh[j] = dconcat[in + j];
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Pooling

Tensor masked_mean_pool(const Tensor& hidden, std::span<const std::uint8_t> mask) {
  require(hidden.rank() == 3, "masked_mean_pool: expected rows x steps x h, got " + shape_to_string(hidden.shape()));
  const std::size_t n = hidden.dim(0), steps = hidden.dim(1), h = hidden.dim(2);
  check_mask(mask, n, steps, "masked_mean_pool");
  Tensor out({n, h});
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t count = 0;
    auto o = out.row(r);
    for (std::size_t t = 0; t < steps; ++t) {
      if (mask[r * steps + t] == 0) continue;
      ++count;
      const double* src = hidden.data().data() + (r * steps + t) * h;
      for (std::size_t j = 0; j < h; ++j) o[j] += src[j];
    }
    if (count == 0) throw DimensionError("masked_mean_pool: row " + std::to_string(r) + " has no valid steps");
    for (auto& v : o) v /= static_cast<double>(count);
  }
  return out;
}

Tensor masked_mean_pool_backward(const Tensor& upstream, std::span<const std::uint8_t> mask, std::size_t steps) {
  const std::size_t n = upstream.dim(0), h = upstream.dim(1);
  check_mask(mask, n, steps, "masked_mean_pool_backward");
  Tensor out({n, steps, h});
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t count = 0;
    for (std::size_t t = 0; t < steps; ++t) count += mask[r * steps + t] != 0;
    if (count == 0) continue;
    const double scale = 1.0 / static_cast<double>(count);
    const auto up = upstream.row(r);
    for (std::size_t t = 0; t < steps; ++t) {
      if (mask[r * steps + t] == 0) continue;
      double* dst = out.data().data() + (r * steps + t) * h;
      for (std::size_t j = 0; j < h; ++j) dst[j] = up[j] * scale;
    }
  }
  return out;
}

namespace {

std::size_t last_valid_step(std::span<const std::uint8_t> mask, std::size_t r, std::size_t steps) {
  for (std::size_t t = steps; t-- > 0;) {
    if (mask[r * steps + t] != 0) return t;
  }
  throw DimensionError("last_valid_pool: row " + std::to_string(r) + " has no valid steps");
}

}  // namespace

Tensor last_valid_pool(const Tensor& hidden, std::span<const std::uint8_t> mask) {
  require(hidden.rank() == 3, "last_valid_pool: expected rows x steps x h, got " + shape_to_string(hidden.shape()));
  const std::size_t n = hidden.dim(0), steps = hidden.dim(1), h = hidden.dim(2);
  check_mask(mask, n, steps, "last_valid_pool");
  Tensor out({n, h});
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t t = last_valid_step(mask, r, steps);
    const double* src = hidden.data().data() + (r * steps + t) * h;
    std::copy(src, src + h, out.row(r).begin());
  }
  return out;
}

Tensor last_valid_pool_backward(const Tensor& upstream, std::span<const std::uint8_t> mask, std::size_t steps) {
  const std::size_t n = upstream.dim(0), h = upstream.dim(1);
  check_mask(mask, n, steps, "last_valid_pool_backward");
  Tensor out({n, steps, h});
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t t = last_valid_step(mask, r, steps);
    const auto up = upstream.row(r);
    std::copy(up.begin(), up.end(), out.data().begin() + static_cast<std::ptrdiff_t>((r * steps + t) * h));
  }
  return out;
}

Tensor pool_sequence(const Tensor& hidden, std::span<const std::uint8_t> mask, Pooling pooling) {
  return pooling == Pooling::kMean ? masked_mean_pool(hidden, mask) : last_valid_pool(hidden, mask);
}

Tensor pool_sequence_backward(const Tensor& upstream, std::span<const std::uint8_t> mask, std::size_t steps,
                              Pooling pooling) {
  return pooling == Pooling::kMean ? masked_mean_pool_backward(upstream, mask, steps)
                                   : last_valid_pool_backward(upstream, mask, steps);
}

// ---------------------------------------------------------------------------
// Dense

void DenseLayer::append_params(ParamList& out, const std::string& prefix) {
  out.push_back({prefix + "weights", &weights});
  out.push_back({prefix + "bias", &bias});
}

DenseLayer init_dense(std::size_t input_size, std::size_t output_size, SeededRng& rng, double scale) {
  DenseLayer layer{Tensor({input_size, output_size}), Tensor({output_size})};
  fill_uniform(layer.weights, rng, scale);
  return layer;
}

Tensor dense_forward(const Tensor& x, const DenseLayer& layer) {
  require(x.rank() == 2 && x.dim(1) == layer.input_size(),
          "dense_forward: input " + shape_to_string(x.shape()) + " vs weights " + shape_to_string(layer.weights.shape()));
  Tensor out = matmul(x, layer.weights);
  const std::size_t d = layer.output_size();
  for (std::size_t i = 0; i < out.dim(0); ++i) {
    auto o = out.row(i);
    for (std::size_t j = 0; j < d; ++j) o[j] += layer.bias[j];
  }
  return out;
}

Tensor dense_backward(const Tensor& upstream, const Tensor& x, const DenseLayer& layer, DenseLayer& grad) {
  require(upstream.rank() == 2 && upstream.dim(0) == x.dim(0) && upstream.dim(1) == layer.output_size(),
          "dense_backward: upstream " + shape_to_string(upstream.shape()) + " does not match forward");
  const Tensor dw = matmul(transpose(x), upstream);
  for (std::size_t i = 0; i < dw.size(); ++i) grad.weights[i] += dw[i];
  for (std::size_t i = 0; i < upstream.dim(0); ++i) {
    const auto up = upstream.row(i);
    for (std::size_t j = 0; j < up.size(); ++j) grad.bias[j] += up[j];
  }
  return matmul(upstream, transpose(layer.weights));
}

Tensor l2_normalize_rows_backward(const Tensor& upstream, const NormalizedRows& forward) {
  require(upstream.shape() == forward.rows.shape(), "l2_normalize_rows_backward: shape mismatch");
  Tensor out(upstream.shape());
  for (std::size_t i = 0; i < upstream.dim(0); ++i) {
    if (forward.degenerate[i]) continue;
    const auto y = forward.rows.row(i);
    const auto g = upstream.row(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) dot += y[j] * g[j];
    auto o = out.row(i);
    for (std::size_t j = 0; j < y.size(); ++j) o[j] = (g[j] - y[j] * dot) / forward.norms[i];
  }
  return out;
}

}  // namespace multisiam
