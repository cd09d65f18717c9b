#include <doctest.h>

#include <cmath>
#include <limits>

#include "support/oracles.hpp"

using namespace abrf;
using namespace abrf::testing;

TEST_CASE("project_simplex leaves simplex points unchanged") {
  const std::vector<double> p{0.3, 0.7};
  const std::vector<double> q = project_simplex(p);
  CHECK(q[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(q[1] == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("project_simplex clamps to vertices and splits ties") {
  const std::vector<double> vertex = project_simplex(std::vector<double>{2.0, 0.0});
  CHECK(vertex[0] == doctest::Approx(1.0));
  CHECK(vertex[1] == doctest::Approx(0.0));
  // (0.6, 0.6): threshold 0.1, both coordinates land at 0.5.
  const std::vector<double> tie = project_simplex(std::vector<double>{0.6, 0.6});
  CHECK(tie[0] == doctest::Approx(0.5));
  CHECK(tie[1] == doctest::Approx(0.5));
}

TEST_CASE("project_simplex is a true euclidean projection") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dims = 1 + rng.below(8);
    std::vector<double> y(dims);
    for (auto& v : y) v = rng.uniform(-3.0, 3.0);
    const std::vector<double> p = project_simplex(y);
    double sum = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
    // No random simplex point may be closer to y than the projection.
    double proj_dist = 0.0;
    for (std::size_t i = 0; i < dims; ++i) proj_dist += (p[i] - y[i]) * (p[i] - y[i]);
    for (int probe = 0; probe < 20; ++probe) {
      std::vector<double> q(dims);
      double qs = 0.0;
      for (auto& v : q) {
        v = rng.next_double() + 1e-9;
        qs += v;
      }
      for (auto& v : q) v /= qs;
      double dist = 0.0;
      for (std::size_t i = 0; i < dims; ++i) dist += (q[i] - y[i]) * (q[i] - y[i]);
      CHECK(dist >= proj_dist - 1e-9);
    }
    // Idempotence.
    const std::vector<double> pp = project_simplex(p);
    for (std::size_t i = 0; i < dims; ++i) CHECK(std::abs(pp[i] - p[i]) < 1e-12);
  }
}

TEST_CASE("solve_qp with a single tree returns the only feasible point") {
  QpInstance inst;
  inst.n_trees = 1;
  inst.rows = 3;
  inst.V = {1.0, 2.0, -1.0};
  inst.r = {0.5, 1.0, 0.25};
  inst.epsilon = 0.8;
  const QpResult res = solve_qp(inst);
  CHECK(res.w == std::vector<double>{1.0});
  double expected = 0.0;
  for (std::size_t s = 0; s < 3; ++s) {
    const double d = inst.r[s] - inst.epsilon * inst.V[s];
    expected += d * d;
  }
  CHECK(res.objective == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("solve_qp epsilon=0 returns uniform weights and the fixed objective") {
  QpInstance inst;
  inst.n_trees = 4;
  inst.rows = 2;
  inst.V = {1, 2, 3, 4, 5, 6, 7, 8};
  inst.r = {1.5, -0.5};
  inst.epsilon = 0.0;
  const QpResult res = solve_qp(inst);
  CHECK(res.w == uniform_simplex(4));
  CHECK(res.objective == doctest::Approx(1.5 * 1.5 + 0.25));
}

TEST_CASE("solve_qp recovers the identity-design solution") {
  // eps = 1, V = I, r = y = (0.6, 0.4): optimum w = y with zero objective.
  QpInstance inst;
  inst.n_trees = 2;
  inst.rows = 2;
  inst.V = {1.0, 0.0, 0.0, 1.0};
  inst.r = {0.6, 0.4};
  inst.epsilon = 1.0;
  const QpResult res = solve_qp(inst);
  CHECK(res.w[0] == doctest::Approx(0.6).epsilon(1e-7));
  CHECK(res.w[1] == doctest::Approx(0.4).epsilon(1e-7));
  CHECK(res.objective <= qp_grid_minimum(inst) + 1e-4);
  CHECK(res.kkt_residual < 1e-6);
}

TEST_CASE("solve_qp matches the brute-force grid oracle on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t T = 2 + rng.below(2);  // 2 or 3 trees
    const std::size_t rows = 2 + rng.below(19);
    const double eps = 0.1 + 0.9 * rng.next_double();
    const QpInstance inst = random_qp_instance(rng, T, rows, eps);
    const QpResult res = solve_qp(inst);
    assert_simplex(res.w, 1e-9);
    CHECK(res.objective <= qp_grid_minimum(inst) + 1e-4);
    CHECK(res.kkt_residual < 1e-6);
    // The reported objective matches a direct evaluation at w.
    CHECK(res.objective == doctest::Approx(qp_objective(inst, res.w)).epsilon(1e-9));
  }
}

TEST_CASE("solve_qp trace is monotonically non-increasing") {
  Rng rng(77);
  const QpInstance inst = random_qp_instance(rng, 3, 15, 0.7);
  QpOptions options;
  options.record_trace = true;
  const QpResult res = solve_qp(inst, options);
  REQUIRE(res.trace.size() > 2);
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i] <= res.trace[i - 1] + 1e-10 * std::max(1.0, std::abs(res.trace[i - 1])));
}

TEST_CASE("solve_qp rejects non-finite inputs") {
  QpInstance inst;
  inst.n_trees = 2;
  inst.rows = 1;
  inst.V = {1.0, std::numeric_limits<double>::infinity()};
  inst.r = {0.0};
  inst.epsilon = 0.5;
  CHECK_THROWS_AS(solve_qp(inst), Error);
}

TEST_CASE("classification stacking produces n*C rows") {
  // 5 samples, 3 classes, 2 trees: the stacked instance has 15 rows.
  std::vector<InstancePanel> panels(5);
  Rng rng(5);
  for (auto& p : panels) {
    p.n_trees = 2;
    p.num_classes = 3;
    p.distances = {rng.next_double(), rng.next_double()};
    p.class_dists = {0.2, 0.3, 0.5, 0.6, 0.3, 0.1};
  }
  const std::vector<int> labels{0, 1, 2, 1, 0};
  const QpInstance inst = make_qp_instance_classification(panels, labels, 3, 0.5, 1.0);
  CHECK(inst.rows == 15);
  CHECK(inst.n_trees == 2);
}

TEST_CASE("classification QP puts the mass on an always-right tree") {
  // Tree 0 emits the true one-hot distribution for every sample; tree 1 is
  // always wrong. With eps = 1 the optimum is w = (1, 0).
  const int C = 2;
  std::vector<InstancePanel> panels;
  std::vector<int> labels;
  Rng rng(8);
  for (int s = 0; s < 12; ++s) {
    const int label = static_cast<int>(rng.below(2));
    InstancePanel p;
    p.n_trees = 2;
    p.num_classes = C;
    p.distances = {0.5, 0.5};
    p.class_dists.assign(4, 0.0);
    p.class_dists[static_cast<std::size_t>(label)] = 1.0;          // tree 0 correct
    p.class_dists[2 + static_cast<std::size_t>(1 - label)] = 1.0;  // tree 1 wrong
    panels.push_back(std::move(p));
    labels.push_back(label);
  }
  const QpInstance inst = make_qp_instance_classification(panels, labels, C, 1.0, 1.0);
  const QpResult res = solve_qp(inst);
  CHECK(res.w[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.objective <= qp_grid_minimum(inst) + 1e-4);
}

TEST_CASE("classification epsilon=0 objective equals the softmax loss") {
  Rng rng(12);
  const int C = 3;
  std::vector<InstancePanel> panels(5);
  std::vector<int> labels(5);
  for (std::size_t s = 0; s < 5; ++s) {
    panels[s].n_trees = 2;
    panels[s].num_classes = C;
    panels[s].distances = {rng.uniform(0, 2), rng.uniform(0, 2)};
    panels[s].class_dists = {0.5, 0.25, 0.25, 0.1, 0.4, 0.5};
    labels[s] = static_cast<int>(rng.below(3));
  }
  const double tau = 1.3;
  const QpInstance inst = make_qp_instance_classification(panels, labels, C, 0.0, tau);
  const QpResult res = solve_qp(inst);
  double expected = 0.0;
  for (std::size_t s = 0; s < 5; ++s) {
    const std::vector<double> D = softmax_scores(panels[s].distances, tau);
    auto [dist, label] = predict_classification(D, panels[s].class_dists, C);
    for (int c = 0; c < C; ++c) {
      const double one_hot = labels[s] == c ? 1.0 : 0.0;
      expected += (one_hot - dist[static_cast<std::size_t>(c)]) *
                  (one_hot - dist[static_cast<std::size_t>(c)]);
    }
  }
  CHECK(res.objective == doctest::Approx(expected).epsilon(1e-12));
  CHECK(res.w == uniform_simplex(2));
}

TEST_CASE("epsilon=0 objective equals the softmax-model loss") {
  Rng rng(10);
  std::vector<InstancePanel> panels(6);
  std::vector<double> targets(6);
  for (std::size_t s = 0; s < 6; ++s) {
    panels[s].n_trees = 3;
    panels[s].distances = {rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3)};
    panels[s].values = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    targets[s] = rng.uniform(-1, 1);
  }
  const double tau = 0.9;
  const QpInstance inst = make_qp_instance(panels, targets, 0.0, tau);
  const QpResult res = solve_qp(inst);
  double softmax_loss = 0.0;
  for (std::size_t s = 0; s < 6; ++s) {
    const std::vector<double> D = softmax_scores(panels[s].distances, tau);
    const double pred = predict_regression(D, panels[s].values);
    softmax_loss += (targets[s] - pred) * (targets[s] - pred);
  }
  CHECK(res.objective == doctest::Approx(softmax_loss).epsilon(1e-12));
  CHECK(res.w == uniform_simplex(3));
}
