#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "multisiam/rng.h"
#include "multisiam/tensor.h"
#include "multisiam/text.h"

namespace multisiam {

/// Token ids of shape rows x steps with a validity mask of the same shape.
struct TokenBlock {
  std::size_t rows = 0;
  std::size_t steps = 0;
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> mask;
};

/// Non-owning handle on a trainable tensor, used by the optimizer, the
/// checkpoint writer and gradient checks. Gradients of a layer are stored in a
/// value of the same layer type, so parameter and gradient lists line up.
struct NamedTensor {
  std::string name;
  Tensor* tensor = nullptr;
};
using ParamList = std::vector<NamedTensor>;

inline constexpr double kInitScale = 0.08;

// ---------------------------------------------------------------------------
// Embedding

struct EmbeddingLayer {
  Tensor table;  // vocab_size x dim; row 0 (PAD) stays zero

  std::size_t vocab_size() const { return table.dim(0); }
  std::size_t dim() const { return table.dim(1); }
  void zero_pad_row();
  void append_params(ParamList& out, const std::string& prefix);
};

EmbeddingLayer init_embedding(std::size_t vocab_size, std::size_t dim, SeededRng& rng, double scale = kInitScale);

/// rows x steps x dim. PAD ids produce zero vectors regardless of the table.
Tensor embedding_forward(const TokenBlock& ids, const EmbeddingLayer& layer);

/// Scatter-adds `upstream` rows into grad.table; the PAD row is left zero.
void embedding_backward(const Tensor& upstream, const TokenBlock& ids, EmbeddingLayer& grad);

// ---------------------------------------------------------------------------
// LSTM
//
// Gate blocks in `weights` rows are ordered input, forget, cell, output. Each
// row multiplies the concatenation [x_t, h_{t-1}].

struct LstmLayer {
  Tensor weights;  // 4h x (input + h)
  Tensor bias;     // 4h

  std::size_t hidden_size() const { return bias.size() / 4; }
  std::size_t input_size() const { return weights.dim(1) - hidden_size(); }
  void append_params(ParamList& out, const std::string& prefix);
};

/// Uniform(-scale, scale) weights, zero bias except the forget block at 1.
LstmLayer init_lstm(std::size_t input_size, std::size_t hidden_size, SeededRng& rng, double scale = kInitScale);

struct LstmCache {
  std::size_t rows = 0;
  std::size_t steps = 0;
  std::size_t hidden = 0;
  Tensor input;                    // rows x steps x input
  std::vector<std::uint8_t> mask;  // rows x steps
  std::vector<double> gates;       // steps x rows x 4h, post-activation
  std::vector<double> cells;       // (steps+1) x rows x h, slot 0 is the zero state
  std::vector<double> hiddens;     // (steps+1) x rows x h
  std::vector<double> cell_tanh;   // steps x rows x h
};

struct LstmOutput {
  Tensor hidden;  // rows x steps x h
  LstmCache cache;
};

/// Masked steps carry the previous hidden and cell state through unchanged.
LstmOutput lstm_forward(const Tensor& x, std::span<const std::uint8_t> mask, const LstmLayer& layer);

/// Backpropagation through time. Accumulates parameter gradients into `grad`
/// and returns the gradient with respect to the input sequence.
Tensor lstm_backward(const Tensor& upstream, const LstmCache& cache, const LstmLayer& layer, LstmLayer& grad);

// ---------------------------------------------------------------------------
// Sequence pooling

enum class Pooling { kMean, kLast };

/// Mean of hidden vectors over valid steps; a row with no valid step throws.
Tensor masked_mean_pool(const Tensor& hidden, std::span<const std::uint8_t> mask);
Tensor masked_mean_pool_backward(const Tensor& upstream, std::span<const std::uint8_t> mask, std::size_t steps);

Tensor last_valid_pool(const Tensor& hidden, std::span<const std::uint8_t> mask);
Tensor last_valid_pool_backward(const Tensor& upstream, std::span<const std::uint8_t> mask, std::size_t steps);

Tensor pool_sequence(const Tensor& hidden, std::span<const std::uint8_t> mask, Pooling pooling);
Tensor pool_sequence_backward(const Tensor& upstream, std::span<const std::uint8_t> mask, std::size_t steps,
                              Pooling pooling);

// ---------------------------------------------------------------------------
// Dense

struct DenseLayer {
  Tensor weights;  // input x output
  Tensor bias;     // output

  std::size_t input_size() const { return weights.dim(0); }
  std::size_t output_size() const { return weights.dim(1); }
  void append_params(ParamList& out, const std::string& prefix);
};

DenseLayer init_dense(std::size_t input_size, std::size_t output_size, SeededRng& rng, double scale = kInitScale);

/// x W + b.
Tensor dense_forward(const Tensor& x, const DenseLayer& layer);
/// Accumulates dW and db into `grad`; returns dx.
Tensor dense_backward(const Tensor& upstream, const Tensor& x, const DenseLayer& layer, DenseLayer& grad);

// ---------------------------------------------------------------------------

/// Normalization Jacobian applied to an upstream gradient: (g - y (y.g)) / |v|.
/// Degenerate rows get a zero gradient.
Tensor l2_normalize_rows_backward(const Tensor& upstream, const NormalizedRows& forward);

template <typename Layer>
Layer zeros_like(const Layer& layer) {
  Layer out = layer;
  ParamList params;
  out.append_params(params, "");
  for (auto& p : params) p.tensor->fill(0.0);
  return out;
}

}  // namespace multisiam
