#include <benchmark/benchmark.h>

#include "signrec/model.hpp"
#include "signrec/rng.hpp"

using namespace signrec;

namespace {

Batch random_batch(int n, int frames, int dim, int vocab, std::uint64_t seed) {
  Rng rng(seed);
  Batch batch;
  for (int s = 0; s < n; ++s) {
    Eigen::MatrixXf x(frames, dim);
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x.data()[i] = static_cast<float>(rng.gaussian());
    batch.inputs.push_back(std::move(x));
    batch.gloss_labels.push_back(static_cast<int>(rng.uniform_int(vocab)));
    batch.phoneme_labels.push_back({static_cast<int>(rng.uniform_int(5)),
                                    static_cast<int>(rng.uniform_int(6))});
  }
  return batch;
}

}  // namespace

static void BM_ForwardBatch(benchmark::State& state) {
  const int batch_size = static_cast<int>(state.range(0));
  const auto params =
      ModelParameters::init(32, 64, Pooling::TemporalAttention, {50, 5, 6}, 1);
  const Batch batch = random_batch(batch_size, 32, 32, 50, 2);
  for (auto _ : state) benchmark::DoNotOptimize(forward(params, batch));
  state.SetItemsProcessed(state.iterations() * batch_size);
}
BENCHMARK(BM_ForwardBatch)->Arg(1)->Arg(32)->Arg(128);

static void BM_ForwardBackwardBatch(benchmark::State& state) {
  const int batch_size = static_cast<int>(state.range(0));
  const auto params =
      ModelParameters::init(32, 64, Pooling::TemporalAttention, {50, 5, 6}, 1);
  const Batch batch = random_batch(batch_size, 32, 32, 50, 2);
  for (auto _ : state) {
    const auto fwd = forward(params, batch);
    benchmark::DoNotOptimize(backward(params, batch, fwd));
  }
  state.SetItemsProcessed(state.iterations() * batch_size);
}
BENCHMARK(BM_ForwardBackwardBatch)->Arg(32)->Arg(128);

static void BM_MeanPoolingForward(benchmark::State& state) {
  const auto params = ModelParameters::init(32, 64, Pooling::Mean, {50}, 1);
  const Batch batch = random_batch(32, 32, 32, 50, 3);
  for (auto _ : state) benchmark::DoNotOptimize(forward(params, batch));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_MeanPoolingForward);
