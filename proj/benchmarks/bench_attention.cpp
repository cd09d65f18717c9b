#include <benchmark/benchmark.h>

#include "abrf/attention.hpp"
#include "abrf/rng.hpp"

namespace {

void BM_SoftmaxScores(benchmark::State& state) {
  abrf::Rng rng(5);
  std::vector<double> d(static_cast<std::size_t>(state.range(0)));
  for (double& v : d) v = rng.uniform(0, 10);
  for (auto _ : state) {
    auto scores = abrf::softmax_scores(d, 1.0);
    benchmark::DoNotOptimize(scores.data());
  }
}
BENCHMARK(BM_SoftmaxScores)->Arg(100)->Arg(1000);

void BM_Abrf3Weights(benchmark::State& state) {
  abrf::Rng rng(6);
  const std::size_t T = static_cast<std::size_t>(state.range(0));
  abrf::InstancePanel panel;
  panel.n_trees = T;
  panel.distances.resize(T);
  for (double& v : panel.distances) v = rng.uniform(0, 10);
  abrf::AttentionParams params;
  params.epsilon = 0.5;
  params.v = abrf::uniform_simplex(T);
  params.w = abrf::uniform_simplex(T);
  params.z = abrf::uniform_simplex(10);
  for (auto _ : state) {
    auto alpha = abrf::abrf3_weights(panel, params);
    benchmark::DoNotOptimize(alpha.data());
  }
}
BENCHMARK(BM_Abrf3Weights)->Arg(100)->Arg(1000);

}  // namespace
