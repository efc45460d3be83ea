#include "multisiam/training.h"

#include <chrono>
#include <cmath>

#include <json.hpp>

#include "multisiam/grouping.h"
#include "multisiam/optim.h"
#include "multisiam/siamese_baseline.h"
#include "multisiam/triplet_loss.h"

namespace multisiam {
namespace {

using Clock = std::chrono::steady_clock;

struct Optimizer {
  const TrainConfig& cfg;
  AdamState adam;

  template <typename Model>
  void step(Model& model, Model& grad) {
    ParamList params = model.params();
    ParamList grads = grad.params();
    check_finite(grads);
    if (cfg.clip_norm > 0.0) clip_grad_norm(grads, cfg.clip_norm);
    if (cfg.optimizer == "sgd") {
      sgd_step(params, grads, cfg.learning_rate);
    } else {
      adam_step(params, grads, adam, cfg.learning_rate);
    }
    model.embedding.zero_pad_row();
  }
};

void require_finite(double loss, std::size_t epoch, std::size_t step) {
  if (!std::isfinite(loss)) {
    throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " + std::to_string(step));
  }
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Shared epoch loop for the two metric-learning variants.
template <typename StepFn>
TrainResult<MultiSiamModel> run_metric_training(const std::vector<EncodedGroup>& groups, std::size_t vocab_size,
                                                const TrainConfig& cfg, const std::vector<EncodedPair>* validation,
                                                const MetricsSink& sink, StepFn&& step_fn) {
  cfg.validate();
  if (cfg.group_size < 2) throw std::invalid_argument("invalid training config: triplet training needs group_size >= 2");
  SeededRng master(cfg.seed);
  SeededRng init_rng = master.split();
  SeededRng batch_rng = master.split();
  TrainResult<MultiSiamModel> result{
      init_multisiam(EncoderConfig{vocab_size, cfg.embed_dim, cfg.hidden, cfg.pooling}, init_rng), {}};
  Optimizer opt{cfg, {}};
  const TripletConfig tcfg{cfg.alpha};

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto batches =
        make_batches(groups, cfg.batch_size, cfg.group_size, cfg.text_size, batch_rng, cfg.qid_disjoint);
    EpochMetrics m;
    m.epoch = epoch;
    double train_seconds = 0.0;
    for (const auto& batch : batches) {
      const auto start = Clock::now();
      auto [loss, grad] = step_fn(result.model, batch, tcfg);
      require_finite(loss, epoch, m.steps + 1);
      opt.step(result.model, grad);
      train_seconds += seconds_since(start);
      m.loss += loss;
      ++m.steps;
    }
    if (m.steps > 0) {
      m.loss /= static_cast<double>(m.steps);
      m.seconds_per_step = train_seconds / static_cast<double>(m.steps);
    }
    if (validation != nullptr && !validation->empty()) m.accuracy = pair_accuracy(result.model, *validation, cfg.tau);
    if (sink) sink(m);
    result.metrics.push_back(m);
  }
  return result;
}

struct StepOutput {
  double loss;
  MultiSiamModel grad;
};

StepOutput multisiam_step(const MultiSiamModel& model, const GroupedBatch& batch, const TripletConfig& tcfg) {
  const auto fwd = forward_grouped(model, batch);
  auto loss = triplet_loss(fwd.embeddings.e, tcfg);
  return {loss.breakdown.loss, backward_grouped(model, fwd.cache, loss.grad)};
}

StepOutput pairwise_step(const MultiSiamModel& model, const GroupedBatch& batch, const TripletConfig& tcfg) {
  auto s = siamese_step(model, batch, tcfg);
  return {s.loss, std::move(s.grad)};
}

}  // namespace

std::string metrics_json_line(const EpochMetrics& m) {
  nlohmann::ordered_json j;
  j["epoch"] = m.epoch;
  j["loss"] = m.loss;
  if (m.ce) j["ce"] = *m.ce;
  if (m.triplet) j["triplet"] = *m.triplet;
  if (m.accuracy) j["accuracy"] = *m.accuracy;
  j["seconds_per_step"] = m.seconds_per_step;
  j["steps"] = m.steps;
  return j.dump();
}

TrainResult<MultiSiamModel> train_multisiam(const std::vector<EncodedGroup>& groups, std::size_t vocab_size,
                                            const TrainConfig& cfg, const std::vector<EncodedPair>* validation,
                                            const MetricsSink& sink) {
  return run_metric_training(groups, vocab_size, cfg, validation, sink, multisiam_step);
}

TrainResult<MultiSiamModel> train_siamese(const std::vector<EncodedGroup>& groups, std::size_t vocab_size,
                                          const TrainConfig& cfg, const std::vector<EncodedPair>* validation,
                                          const MetricsSink& sink) {
  if (cfg.group_size != 2) throw std::invalid_argument("train_siamese: the pairwise baseline needs group_size 2");
  return run_metric_training(groups, vocab_size, cfg, validation, sink, pairwise_step);
}

TrainResult<SmcdModel> train_smcd(const std::vector<EncodedGroup>& groups, std::size_t vocab_size,
                                  std::size_t num_categories, const TrainConfig& cfg, const MetricsSink& sink) {
  cfg.validate();
  for (const auto& g : groups) {
    if (g.category < 0 || static_cast<std::size_t>(g.category) >= num_categories) {
      throw DataError("train_smcd: every group needs a category label below " + std::to_string(num_categories));
    }
  }
  SeededRng master(cfg.seed);
  SeededRng init_rng = master.split();
  SeededRng batch_rng = master.split();
  TrainResult<SmcdModel> result{
      init_smcd(SmcdConfig{vocab_size, cfg.embed_dim, cfg.hidden, num_categories, cfg.pooling}, init_rng), {}};
  Optimizer opt{cfg, {}};
  const TripletConfig tcfg{cfg.alpha};

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto batches =
        make_batches(groups, cfg.batch_size, cfg.group_size, cfg.text_size, batch_rng, cfg.qid_disjoint);
    EpochMetrics m;
    m.epoch = epoch;
    double ce = 0.0, triplet = 0.0, train_seconds = 0.0;
    std::size_t correct = 0, rows = 0;
    for (const auto& batch : batches) {
      const auto start = Clock::now();
      const auto fwd = smcd_forward(result.model, batch);
      const auto loss = smcd_loss(fwd.output, batch.category_labels, tcfg, cfg.lambda_dup);
      require_finite(loss.total, epoch, m.steps + 1);
      auto grad = smcd_backward(result.model, fwd.cache, loss.dlogits, loss.d_dup);
      opt.step(result.model, grad);
      train_seconds += seconds_since(start);

      const auto predicted = classify_probs(fwd.output.probs, {});
      for (std::size_t r = 0; r < predicted.size(); ++r) {
        correct += static_cast<std::int32_t>(predicted[r].category) == batch.category_labels[r];
      }
      rows += predicted.size();
      m.loss += loss.total;
      ce += loss.ce;
      triplet += loss.triplet;
      ++m.steps;
    }
    if (m.steps > 0) {
      const auto steps = static_cast<double>(m.steps);
      m.loss /= steps;
      m.ce = ce / steps;
      m.triplet = triplet / steps;
      m.accuracy = static_cast<double>(correct) / static_cast<double>(rows);
      m.seconds_per_step = train_seconds / steps;
    }
    if (sink) sink(m);
    result.metrics.push_back(m);
  }
  return result;
}

StepTiming time_training_steps(const MultiSiamModel& model, const GroupedBatch& pairs, const TrainConfig& cfg,
                               std::size_t steps) {
  const TripletConfig tcfg{cfg.alpha};
  auto time_it = [&](auto&& step_fn) {
    MultiSiamModel local = model;
    Optimizer opt{cfg, {}};
    auto warm = step_fn(local, pairs, tcfg);
    opt.step(local, warm.grad);
    const auto start = Clock::now();
    for (std::size_t s = 0; s < steps; ++s) {
      auto out = step_fn(local, pairs, tcfg);
      opt.step(local, out.grad);
    }
    return seconds_since(start) / static_cast<double>(std::max<std::size_t>(steps, 1));
  };
  return StepTiming{time_it(multisiam_step), time_it(pairwise_step)};
}

}  // namespace multisiam
