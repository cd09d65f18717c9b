#include <benchmark/benchmark.h>

#include "abrf/generators.hpp"
#include "abrf/solver.hpp"

namespace {

abrf::Dataset regression_data(std::size_t n) { return abrf::gen_friedman(1, n, 1.0, 7); }

void BM_FitForestRf(benchmark::State& state) {
  const abrf::Dataset ds = regression_data(static_cast<std::size_t>(state.range(0)));
  abrf::ForestConfig cfg;
  cfg.n_trees = 100;
  cfg.condition = abrf::GrowthCondition::condition2();
  cfg.seed = 3;
  for (auto _ : state) {
    abrf::Forest forest = abrf::fit_forest(ds, cfg);
    benchmark::DoNotOptimize(forest.trees.data());
  }
}
BENCHMARK(BM_FitForestRf)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitForestErt(benchmark::State& state) {
  const abrf::Dataset ds = regression_data(static_cast<std::size_t>(state.range(0)));
  abrf::ForestConfig cfg;
  cfg.n_trees = 100;
  cfg.ensemble = abrf::Ensemble::kErt;
  cfg.condition = abrf::GrowthCondition::condition2();
  cfg.seed = 3;
  for (auto _ : state) {
    abrf::Forest forest = abrf::fit_forest(ds, cfg);
    benchmark::DoNotOptimize(forest.trees.data());
  }
}
BENCHMARK(BM_FitForestErt)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_PanelsFullDataset(benchmark::State& state) {
  const abrf::Dataset ds = regression_data(500);
  abrf::ForestConfig cfg;
  cfg.n_trees = 100;
  cfg.condition = abrf::GrowthCondition::condition2();
  cfg.seed = 3;
  const abrf::Forest forest = abrf::fit_forest(ds, cfg);
  for (auto _ : state) {
    auto panels = abrf::compute_panels(forest, ds);
    benchmark::DoNotOptimize(panels.data());
  }
}
BENCHMARK(BM_PanelsFullDataset)->Unit(benchmark::kMillisecond);

}  // namespace
