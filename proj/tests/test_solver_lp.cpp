#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"

using namespace abrf;
using namespace abrf::testing;

TEST_CASE("solve_lp epsilon=0 returns the absolute-residual sum") {
  LpInstance inst;
  inst.n_trees = 3;
  inst.n = 4;
  inst.V.assign(12, 1.0);
  inst.Q = {1.0, -2.0, 0.5, 0.0};
  inst.epsilon = 0.0;
  const LpResult res = solve_lp(inst);
  CHECK(res.w == uniform_simplex(3));
  CHECK(res.objective == doctest::Approx(3.5));
}

TEST_CASE("solve_lp with one tree fixes w and the objective") {
  LpInstance inst;
  inst.n_trees = 1;
  inst.n = 3;
  inst.V = {2.0, -1.0, 0.5};
  inst.Q = {1.0, 1.0, 1.0};
  inst.epsilon = 0.5;
  const LpResult res = solve_lp(inst);
  CHECK(res.w[0] == doctest::Approx(1.0).epsilon(1e-9));
  double expected = 0.0;
  for (std::size_t s = 0; s < 3; ++s)
    expected += std::abs(inst.Q[s] - inst.epsilon * inst.V[s]);
  CHECK(res.objective == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("solve_lp matches the L1 grid oracle on random instances") {
  Rng rng(501);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t T = 2 + rng.below(2);
    const std::size_t rows = 2 + rng.below(19);
    const double eps = 0.1 + 0.9 * rng.next_double();
    const LpInstance inst = random_lp_instance(rng, T, rows, eps);
    const LpResult res = solve_lp(inst);
    assert_simplex(res.w, 1e-7);
    const double oracle = lp_grid_minimum(inst);
    CHECK(res.objective <= oracle + 1e-4);
    CHECK(res.objective == doctest::Approx(lp_objective(inst, res.w)).epsilon(1e-7));
  }
}

TEST_CASE("solve_lp at epsilon=1 solves the weighted-forest L1 problem") {
  // At eps = 1 the residual Q reduces to the raw targets, so the LP is the
  // plain min over the simplex of sum |y - V w|.
  Rng rng(88);
  std::vector<InstancePanel> panels(8);
  std::vector<double> targets(8);
  for (std::size_t s = 0; s < 8; ++s) {
    panels[s].n_trees = 3;
    panels[s].distances = {rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2)};
    panels[s].values = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    targets[s] = rng.uniform(-1, 1);
  }
  const LpInstance inst = make_lp_instance(panels, targets, 1.0, 1.0);
  for (std::size_t s = 0; s < 8; ++s) CHECK(inst.Q[s] == doctest::Approx(targets[s]));
  const LpResult res = solve_lp(inst);
  CHECK(res.objective <= lp_grid_minimum(inst) + 1e-4);
}

TEST_CASE("solve_lp survives degenerate ties via Bland's rule") {
  // Identical rows create massive degeneracy in the ratio test.
  LpInstance inst;
  inst.n_trees = 3;
  inst.n = 12;
  inst.V.resize(36);
  inst.Q.resize(12);
  for (std::size_t s = 0; s < 12; ++s) {
    inst.V[s * 3 + 0] = 1.0;
    inst.V[s * 3 + 1] = 1.0;
    inst.V[s * 3 + 2] = -1.0;
    inst.Q[s] = s % 2 == 0 ? 0.5 : -0.5;
  }
  inst.epsilon = 1.0;
  const LpResult res = solve_lp(inst);
  CHECK(res.objective <= lp_grid_minimum(inst) + 1e-4);
}

TEST_CASE("solve_lp reports pivot exhaustion as an error") {
  Rng rng(7);
  const LpInstance inst = random_lp_instance(rng, 3, 10, 0.9);
  LpOptions options;
  options.max_pivots = 1;
  CHECK_THROWS_WITH_AS(solve_lp(inst, options), doctest::Contains("pivot budget"), Error);
}

TEST_CASE("solve_lp records a non-increasing phase-2 objective trace") {
  Rng rng(91);
  const LpInstance inst = random_lp_instance(rng, 3, 15, 0.8);
  LpOptions options;
  options.record_trace = true;
  const LpResult res = solve_lp(inst, options);
  REQUIRE(!res.trace.empty());
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i] <= res.trace[i - 1] + 1e-9);
  CHECK(res.trace.back() == doctest::Approx(res.objective));
}

TEST_CASE("solve_lp rejects malformed instances") {
  LpInstance inst;
  inst.n_trees = 2;
  inst.n = 2;
  inst.V = {1.0, 2.0, 3.0};  // wrong size
  inst.Q = {0.0, 0.0};
  inst.epsilon = 0.5;
  CHECK_THROWS_AS(solve_lp(inst), Error);
}
