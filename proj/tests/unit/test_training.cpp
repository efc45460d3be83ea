#include <gtest/gtest.h>

#include <cmath>

#include <json.hpp>

#include "fixtures.h"
#include "multisiam/checkpoint.h"
#include "multisiam/training.h"

using namespace multisiam;

namespace {

TrainConfig micro_config(std::size_t epochs) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 4;
  cfg.group_size = 3;
  cfg.text_size = 12;
  cfg.embed_dim = 16;
  cfg.hidden = 16;
  cfg.learning_rate = 1e-2;
  cfg.seed = 7;
  return cfg;
}

fixtures::MicroData micro() { return fixtures::micro_dataset(4, 8, 3, 3, 12, 11); }

void expect_pad_row_zero(const EmbeddingLayer& e) {
  for (std::size_t k = 0; k < e.table.dim(1); ++k) EXPECT_EQ(e.table.at(kPadId, k), 0.0);
}

}  // namespace

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.learning_rate = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.optimizer = "rmsprop";
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Training, ZeroEpochsReturnsInitialModel) {
  const auto data = micro();
  const auto r = train_multisiam(data.encoded, data.vocab.size(), micro_config(0));
  EXPECT_TRUE(r.metrics.empty());
  SeededRng master(7);
  SeededRng init_rng = master.split();
  MultiSiamModel fresh = init_multisiam({data.vocab.size(), 16, 16, Pooling::kMean}, init_rng);
  MultiSiamModel trained = r.model;
  const auto a = fresh.params(), b = trained.params();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i].tensor, *b[i].tensor) << a[i].name;
}

TEST(Training, MultiSiamLossHalvesOnMicroData) {
  const auto data = micro();
  std::vector<EpochMetrics> streamed;
  const auto r = train_multisiam(data.encoded, data.vocab.size(), micro_config(10), nullptr,
                                 [&](const EpochMetrics& m) { streamed.push_back(m); });
  ASSERT_EQ(r.metrics.size(), 10u);
  ASSERT_EQ(streamed.size(), 10u);
  for (const auto& m : r.metrics) {
    EXPECT_TRUE(std::isfinite(m.loss));
    EXPECT_EQ(m.steps, 2u);
  }
  EXPECT_LT(r.metrics.back().loss, 0.5 * r.metrics.front().loss);
  expect_pad_row_zero(r.model.embedding);
}

TEST(Training, SeededRunsAreBitIdentical) {
  const auto data = micro();
  const auto a = train_multisiam(data.encoded, data.vocab.size(), micro_config(5));
  const auto b = train_multisiam(data.encoded, data.vocab.size(), micro_config(5));
  EXPECT_EQ(serialize_checkpoint(MultiSiamBundle{a.model, data.vocab, micro_config(5)}),
            serialize_checkpoint(MultiSiamBundle{b.model, data.vocab, micro_config(5)}));
  for (std::size_t i = 0; i < a.metrics.size(); ++i) EXPECT_EQ(a.metrics[i].loss, b.metrics[i].loss);
}

TEST(Training, SmcdReportsAllMetrics) {
  const auto data = micro();
  const auto r = train_smcd(data.encoded, data.vocab.size(), data.categories.size(), micro_config(3));
  ASSERT_EQ(r.metrics.size(), 3u);
  for (const auto& m : r.metrics) {
    ASSERT_TRUE(m.ce && m.triplet && m.accuracy);
    EXPECT_NEAR(m.loss, *m.ce + *m.triplet, 1e-12);
    EXPECT_GE(*m.accuracy, 0.0);
    EXPECT_LE(*m.accuracy, 1.0);
  }
  expect_pad_row_zero(r.model.embedding);
}

TEST(Training, SmcdZeroLambdaIsPureClassifier) {
  const auto data = micro();
  TrainConfig cfg = micro_config(2);
  cfg.lambda_dup = 0.0;
  const auto r = train_smcd(data.encoded, data.vocab.size(), data.categories.size(), cfg);
  for (const auto& m : r.metrics) {
    ASSERT_TRUE(m.ce && m.triplet);
    EXPECT_EQ(m.loss, *m.ce);
    EXPECT_GT(*m.triplet, 0.0);
  }
}

TEST(Training, SmcdSeededRunsAreBitIdentical) {
  const auto data = micro();
  const std::size_t c = data.categories.size();
  const auto a = train_smcd(data.encoded, data.vocab.size(), c, micro_config(3));
  const auto b = train_smcd(data.encoded, data.vocab.size(), c, micro_config(3));
  EXPECT_EQ(serialize_checkpoint(SmcdBundle{a.model, data.vocab, data.categories, micro_config(3)}),
            serialize_checkpoint(SmcdBundle{b.model, data.vocab, data.categories, micro_config(3)}));
}

TEST(Training, SiameseBaselineNeedsPairs) {
  const auto data = micro();
  EXPECT_THROW(train_siamese(data.encoded, data.vocab.size(), micro_config(1)), std::invalid_argument);
}

TEST(Metrics, JsonLineFields) {
  EpochMetrics m;
  m.epoch = 3;
  m.loss = 0.5;
  m.ce = 0.25;
  m.seconds_per_step = 0.01;
  const auto j = nlohmann::json::parse(metrics_json_line(m));
  EXPECT_EQ(j.at("epoch"), 3);
  EXPECT_EQ(j.at("loss"), 0.5);
  EXPECT_EQ(j.at("ce"), 0.25);
  EXPECT_FALSE(j.contains("triplet"));
  EXPECT_FALSE(j.contains("accuracy"));
  EXPECT_TRUE(j.contains("seconds_per_step"));
  EXPECT_EQ(metrics_json_line(m).find('\n'), std::string::npos);
}

TEST(StepTiming, ReportsBothModels) {
  const auto data = micro();
  SeededRng rng(3);
  MultiSiamModel model = init_multisiam({data.vocab.size(), 8, 8, Pooling::kMean}, rng);
  std::vector<const EncodedGroup*> ptrs;
  std::vector<EncodedGroup> pairs;
  for (const auto& g : data.encoded) pairs.push_back({{g.members[0], g.members[1]}, {g.sources[0], g.sources[1]}, -1});
  for (const auto& g : pairs) ptrs.push_back(&g);
  const GroupedBatch batch = assemble_batch(ptrs, 2, 12);
  const auto t = time_training_steps(model, batch, micro_config(1), 2);
  EXPECT_GT(t.multisiam_seconds, 0.0);
  EXPECT_GT(t.siamese_seconds, 0.0);
}
