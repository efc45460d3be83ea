#include <benchmark/benchmark.h>

#include "multisiam/grouping.h"
#include "multisiam/multisiam.h"
#include "multisiam/siamese_baseline.h"
#include "multisiam/smcd.h"
#include "multisiam/triplet_loss.h"

using namespace multisiam;

namespace {

constexpr std::size_t kVocab = 2000;

GroupedBatch random_batch(std::size_t batch, std::size_t group, std::size_t steps, SeededRng& rng) {
  GroupedBatch b;
  b.batch_size = batch;
  b.group_size = group;
  b.text_size = steps;
  for (std::size_t r = 0; r < batch * group; ++r) {
    const std::size_t len = steps / 2 + rng.below(steps / 2 + 1);
    for (std::size_t t = 0; t < steps; ++t) {
      const bool valid = t < len;
      b.ids.push_back(valid ? static_cast<TokenId>(2 + rng.below(kVocab - 2)) : kPadId);
      b.token_mask.push_back(valid ? 1 : 0);
    }
  }
  return b;
}

MultiSiamModel model(std::size_t width) {
  SeededRng rng(1);
  return init_multisiam({kVocab, width, width, Pooling::kMean}, rng);
}

// Forward, triplet loss and backward for one G=2 batch.
void BM_MultiSiamStep(benchmark::State& state) {
  const auto batch_size = static_cast<std::size_t>(state.range(0));
  SeededRng rng(2);
  const MultiSiamModel m = model(64);
  const GroupedBatch batch = random_batch(batch_size, 2, 32, rng);
  for (auto _ : state) {
    const auto fwd = forward_grouped(m, batch);
    const auto loss = triplet_loss(fwd.embeddings.e, {});
    benchmark::DoNotOptimize(backward_grouped(m, fwd.cache, loss.grad));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch_size));
}

// Two-tower pairwise step on the same batch shape.
void BM_SiameseStep(benchmark::State& state) {
  const auto batch_size = static_cast<std::size_t>(state.range(0));
  SeededRng rng(2);
  const MultiSiamModel m = model(64);
  const GroupedBatch batch = random_batch(batch_size, 2, 32, rng);
  for (auto _ : state) benchmark::DoNotOptimize(siamese_step(m, batch, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch_size));
}

void BM_SmcdStep(benchmark::State& state) {
  SeededRng rng(3);
  const SmcdModel m = init_smcd({kVocab, 64, 64, 13, Pooling::kMean}, rng);
  const GroupedBatch batch = random_batch(16, 4, 32, rng);
  std::vector<std::int32_t> labels;
  for (std::size_t i = 0; i < 64; ++i) labels.push_back(static_cast<std::int32_t>(i / 4 % 13));
  for (auto _ : state) {
    const auto fwd = smcd_forward(m, batch);
    const auto loss = smcd_loss(fwd.output, labels, {}, 1.0);
    benchmark::DoNotOptimize(smcd_backward(m, fwd.cache, loss.dlogits, loss.d_dup));
  }
}

void BM_TripletLoss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SeededRng rng(4);
  Tensor e({n, 4, 64});
  for (auto& v : e.data()) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(triplet_loss(e, {}));
}

void BM_GroupByThreshold(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SeededRng rng(5);
  Tensor e({n, 64});
  for (auto& v : e.data()) v = rng.uniform(-1.0, 1.0);
  const Tensor unit = l2_normalize_rows(e).rows;
  for (auto _ : state) benchmark::DoNotOptimize(group_by_threshold(unit, 0.7));
}

}  // namespace

BENCHMARK(BM_MultiSiamStep)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SiameseStep)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmcdStep)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TripletLoss)->Arg(16)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GroupByThreshold)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
