#include <benchmark/benchmark.h>

#include "abrf/rng.hpp"
#include "abrf/solver.hpp"

namespace {

abrf::QpInstance qp_instance(std::size_t n_trees, std::size_t rows) {
  abrf::Rng rng(17);
  abrf::QpInstance inst;
  inst.n_trees = n_trees;
  inst.rows = rows;
  inst.epsilon = 0.5;
  inst.V.resize(rows * n_trees);
  inst.r.resize(rows);
  for (double& v : inst.V) v = rng.uniform(-1, 1);
  for (double& v : inst.r) v = rng.uniform(-1, 1);
  return inst;
}

void BM_SolveQp(benchmark::State& state) {
  const abrf::QpInstance inst =
      qp_instance(static_cast<std::size_t>(state.range(0)), 250);
  for (auto _ : state) {
    auto res = abrf::solve_qp(inst);
    benchmark::DoNotOptimize(res.objective);
  }
}
BENCHMARK(BM_SolveQp)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SolveLp(benchmark::State& state) {
  abrf::Rng rng(23);
  abrf::LpInstance inst;
  inst.n_trees = static_cast<std::size_t>(state.range(0));
  inst.n = 100;
  inst.epsilon = 0.5;
  inst.V.resize(inst.n * inst.n_trees);
  inst.Q.resize(inst.n);
  for (double& v : inst.V) v = rng.uniform(-1, 1);
  for (double& v : inst.Q) v = rng.uniform(-1, 1);
  for (auto _ : state) {
    auto res = abrf::solve_lp(inst);
    benchmark::DoNotOptimize(res.objective);
  }
}
BENCHMARK(BM_SolveLp)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_ProjectSimplex(benchmark::State& state) {
  abrf::Rng rng(29);
  std::vector<double> y(static_cast<std::size_t>(state.range(0)));
  for (double& v : y) v = rng.uniform(-2, 2);
  for (auto _ : state) {
    auto p = abrf::project_simplex(y);
    benchmark::DoNotOptimize(p.data());
  }
}
BENCHMARK(BM_ProjectSimplex)->Arg(100)->Arg(1000);

}  // namespace
