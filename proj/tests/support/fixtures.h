#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "multisiam/batching.h"
#include "multisiam/datasets.h"
#include "multisiam/grad_check.h"
#include "multisiam/layers.h"
#include "multisiam/rng.h"
#include "multisiam/tensor.h"
#include "multisiam/text.h"
#include "oracles.h"

namespace fixtures {

using multisiam::GroupedBatch;
using multisiam::ParamList;
using multisiam::SeededRng;
using multisiam::Shape;
using multisiam::Tensor;

Tensor random_tensor(const Shape& shape, SeededRng& rng, double lo = -1.0, double hi = 1.0);

oracle::Mat to_mat(const Tensor& t);
oracle::Cube to_cube(const Tensor& t);
Tensor from_mat(const oracle::Mat& m);

/// Random token ids in [2, vocab) with a valid prefix of random length in
/// [min_len, steps]; every row is distinct.
multisiam::TokenBlock random_tokens(std::size_t rows, std::size_t steps, std::size_t vocab, SeededRng& rng,
                                    std::size_t min_len = 1);

/// Grouped batch whose texts are all distinct, built from random_tokens.
GroupedBatch random_batch(std::size_t batch, std::size_t group, std::size_t steps, std::size_t vocab,
                          SeededRng& rng, std::size_t min_len = 1);

/// Largest finite-difference relative error over every tensor in `params`.
/// `loss` is evaluated with the parameters as currently stored; `grads` must
/// list gradients in the same order.
double check_params(const ParamList& params, const ParamList& grads, const std::function<double()>& loss,
                    double h = 1e-5);

/// Central-difference steps tried per coordinate by check_params_multistep.
inline const std::vector<double> kCheckSteps = {1e-4, 3e-5, 1e-5, 3e-6};

/// Like check_params, but each coordinate's relative error is the smallest
/// over `steps`. Rounding noise dominates small steps on near-zero
/// coordinates and truncation dominates large steps where curvature is high;
/// a wrong analytic gradient disagrees at every step.
double check_params_multistep(const ParamList& params, const ParamList& grads, const std::function<double()>& loss,
                              const std::vector<double>& steps = kCheckSteps);

/// Synthetic grouped corpus encoded with a min-frequency-1 vocabulary; groups
/// keep their natural sizes padded to `group_size`.
struct MicroData {
  multisiam::Vocabulary vocab;
  std::vector<std::string> categories;
  std::vector<multisiam::TextGroup> groups;
  std::vector<multisiam::EncodedGroup> encoded;
};
MicroData micro_dataset(std::size_t categories, std::size_t groups, std::size_t texts, std::size_t group_size,
                        std::size_t text_size, std::uint64_t seed);

/// Synthetic Quora-format TSV: `duplicates` paraphrase pairs and `negatives`
/// unrelated pairs, questions identified by qid.
std::string quora_tsv(std::size_t duplicates, std::size_t negatives, std::uint64_t seed);

std::string temp_path(const std::string& name);
std::string read_bytes(const std::string& path);
void write_bytes(const std::string& path, const std::string& bytes);

}  // namespace fixtures
