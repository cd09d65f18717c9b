#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abrf/attention.hpp"
#include "abrf/forest.hpp"

namespace abrf {

// Euclidean projection onto the unit simplex (sort-and-threshold).
std::vector<double> project_simplex(std::span<const double> y);

// Least-squares tree-bias training problem: minimize
//   sum_s (r[s] - eps * sum_k V[s,k] w[k])^2   over the unit simplex.
// Regression rows are samples; classification stacks (sample, class) pairs.
struct QpInstance {
  std::size_t rows = 0;
  std::size_t n_trees = 0;
  std::vector<double> V;  // rows x T, row-major
  std::vector<double> r;  // rows
  double epsilon = 0.0;
};

struct QpOptions {
  double tolerance = 1e-9;      // stop when ||w_next - w||_inf drops below
  std::size_t max_iters = 50000;
  bool record_trace = false;
};

struct QpResult {
  std::vector<double> w;
  double objective = 0.0;       // in the instance's original scale
  double kkt_residual = 0.0;    // gradient-mapping norm of the normalized problem
  std::size_t iterations = 0;
  std::vector<double> trace;    // objective per iteration when recorded
};

// Projected gradient descent with fixed step 1/L, L estimated by power
// iteration on V^T V. eps = 0 returns the uniform w with the fixed objective.
QpResult solve_qp(const QpInstance& inst, const QpOptions& options = {});

std::vector<InstancePanel> compute_panels(const Forest& forest, const Dataset& ds,
                                          std::span<const double> z = {});

QpInstance make_qp_instance(std::span<const InstancePanel> panels,
                            std::span<const double> targets, double epsilon, double tau,
                            SoftmaxSign sign = SoftmaxSign::kNegative);

// One-hot residual rows h_s(c) - (1-eps) sum_k D_k p_k(x_s, c), stacked
// sample-major: row index = s * C + c.
QpInstance make_qp_instance_classification(std::span<const InstancePanel> panels,
                                           std::span<const int> labels, int n_classes,
                                           double epsilon, double tau,
                                           SoftmaxSign sign = SoftmaxSign::kNegative);

QpResult solve_qp_classification(const Forest& forest, const Dataset& ds, double epsilon,
                                 double tau, const QpOptions& options = {});

// L1 variant: minimize sum_s |Q[s] - eps * sum_k V[s,k] w[k]| over the simplex,
// rewritten with auxiliary bounds G_s and solved by a dense two-phase simplex
// method (Bland's rule engages on degeneracy).
struct LpInstance {
  std::size_t n = 0;
  std::size_t n_trees = 0;
  std::vector<double> V;  // n x T
  std::vector<double> Q;  // n
  double epsilon = 0.0;
};

struct LpOptions {
  std::size_t max_pivots = 50000;
  bool record_trace = false;
};

struct LpResult {
  std::vector<double> w;
  double objective = 0.0;
  std::size_t pivots = 0;
  std::vector<double> trace;  // phase-2 objective per pivot when recorded
};

LpResult solve_lp(const LpInstance& inst, const LpOptions& options = {});

LpInstance make_lp_instance(std::span<const InstancePanel> panels,
                            std::span<const double> targets, double epsilon, double tau,
                            SoftmaxSign sign = SoftmaxSign::kNegative);

// ---------------------------------------------------------------------------
// Gradient training of the softmax-parameterized weights (v, z, optionally w).
// All simplex constraints are kept by optimizing unconstrained logits that
// map to each simplex through a softmax.

struct GradConfig {
  double learning_rate = 0.1;
  std::size_t max_iters = 5000;
  double tolerance = 1e-8;   // stop when the loss improvement drops below
  std::uint64_t seed = 0;
  bool train_v = true;
  bool train_z = true;
  bool train_w = false;      // only meaningful with the contamination term
};

// Everything the empirical loss needs, extracted once from forest panels:
// per sample and tree the feature differences x_s - A_k(x_s), the leaf value
// (or class distribution), and the target.
struct GradientProblem {
  Task task = Task::kRegression;
  std::size_t n = 0;
  std::size_t n_trees = 0;
  std::size_t n_features = 0;
  int num_classes = 0;
  std::vector<double> diffs;        // n*T*m
  std::vector<double> values;       // n*T (regression)
  std::vector<double> class_dists;  // n*T*C (classification)
  std::vector<double> targets;      // n (regression)
  std::vector<int> labels;          // n (classification)
  double epsilon = 0.0;             // fixed while training
  SoftmaxSign sign = SoftmaxSign::kNegative;
};

GradientProblem make_gradient_problem(const Forest& forest, const Dataset& ds,
                                      double epsilon,
                                      SoftmaxSign sign = SoftmaxSign::kNegative);

struct GradientState {
  std::vector<double> logits_v;  // T
  std::vector<double> logits_z;  // m
  std::vector<double> logits_w;  // T
};

struct GradientEval {
  double loss = 0.0;
  std::vector<double> grad_v;  // d loss / d logits_v
  std::vector<double> grad_z;
  std::vector<double> grad_w;
};

// Loss and analytic gradients with respect to the logits. Exposed so tests
// can check the gradients against central finite differences.
GradientEval eval_gradient(const GradientProblem& problem, const GradientState& state);

struct TrainResult {
  AttentionParams params;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::size_t iterations = 0;
  std::vector<double> trace;
};

// Full-batch gradient descent; returns the best parameters seen by training
// loss. Throws Error (with the iteration count) if the loss turns non-finite.
TrainResult train_gradient(const GradientProblem& problem, const AttentionParams& init,
                           const GradConfig& config);

// Convenience wrapper fitting the problem from a forest and dataset.
TrainResult train_gradient(const Forest& forest, const Dataset& ds,
                           const AttentionParams& init, const GradConfig& config);

// Writes a recorded objective trace as two-column CSV (iteration, objective).
void write_trace_csv(std::span<const double> trace, const std::string& path);

}  // namespace abrf
