#include <algorithm>
#include <cmath>
#include <limits>

#include "abrf/solver.hpp"

namespace abrf {

GradientProblem make_gradient_problem(const Forest& forest, const Dataset& ds,
                                      double epsilon, SoftmaxSign sign) {
  if (ds.task != forest.mode) throw Error("make_gradient_problem: task mismatch");
  GradientProblem p;
  p.task = ds.task;
  p.n = ds.n;
  p.n_trees = forest.size();
  p.n_features = ds.m;
  p.num_classes = forest.num_classes;
  p.epsilon = epsilon;
  p.sign = sign;
  p.diffs.resize(ds.n * p.n_trees * ds.m);
  if (p.task == Task::kRegression) {
    p.values.resize(ds.n * p.n_trees);
    p.targets = ds.targets;
  } else {
    p.class_dists.resize(ds.n * p.n_trees * static_cast<std::size_t>(p.num_classes));
    p.labels = ds.labels;
  }
  for (std::size_t s = 0; s < ds.n; ++s) {
    const InstancePanel pan = panel(forest, ds.row(s));
    const auto x = ds.row(s);
    for (std::size_t k = 0; k < p.n_trees; ++k) {
      for (std::size_t j = 0; j < ds.m; ++j)
        p.diffs[(s * p.n_trees + k) * ds.m + j] = x[j] - pan.mean_vectors[k * ds.m + j];
      if (p.task == Task::kRegression) {
        p.values[s * p.n_trees + k] = pan.values[k];
      } else {
        const auto C = static_cast<std::size_t>(p.num_classes);
        for (std::size_t c = 0; c < C; ++c)
          p.class_dists[(s * p.n_trees + k) * C + c] = pan.class_dists[k * C + c];
      }
    }
  }
  return p;
}

namespace {

std::vector<double> softmax_of_logits(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    sum += out[i];
  }
  for (double& o : out) o /= sum;
  return out;
}

// Chain rule through p = softmax(logits): dL/dlogit_i = p_i (g_i - sum_j p_j g_j).
std::vector<double> logit_gradient(std::span<const double> p, std::span<const double> g) {
  double inner = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) inner += p[i] * g[i];
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] * (g[i] - inner);
  return out;
}

std::vector<double> logits_from_simplex(std::span<const double> p, std::size_t fallback) {
  if (p.empty()) return std::vector<double>(fallback, 0.0);
  std::vector<double> logits(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) logits[i] = std::log(std::max(p[i], 1e-12));
  return logits;
}

}  // namespace

GradientEval eval_gradient(const GradientProblem& problem, const GradientState& state) {
  const std::size_t n = problem.n;
  const std::size_t T = problem.n_trees;
  const std::size_t m = problem.n_features;
  const auto C = static_cast<std::size_t>(std::max(problem.num_classes, 0));
  if (state.logits_v.size() != T || state.logits_z.size() != m ||
      state.logits_w.size() != T)
    throw Error("eval_gradient: logit vector size mismatch");

  const std::vector<double> v = softmax_of_logits(state.logits_v);
  const std::vector<double> z = softmax_of_logits(state.logits_z);
  const std::vector<double> w = softmax_of_logits(state.logits_w);
  const double eps = problem.epsilon;
  const double direction = problem.sign == SoftmaxSign::kNegative ? -1.0 : 1.0;

  std::vector<double> z_sq(m);
  for (std::size_t j = 0; j < m; ++j) z_sq[j] = z[j] * z[j];

  double loss = 0.0;
  std::vector<double> grad_v(T, 0.0), grad_z_direct(m, 0.0), grad_w(T, 0.0);
  std::vector<double> u(T), scores(T), gamma(T), score_grad(T);

  for (std::size_t s = 0; s < n; ++s) {
    const double* diffs = problem.diffs.data() + s * T * m;
    for (std::size_t k = 0; k < T; ++k) {
      double dist = 0.0;
      const double* dk = diffs + k * m;
      for (std::size_t j = 0; j < m; ++j) dist += z_sq[j] * dk[j] * dk[j];
      u[k] = dist;
      scores[k] = direction * dist * v[k] / 2.0;
    }
    const std::vector<double> D = softmax_of_logits(scores);

    // gamma_k = dLoss/dalpha_k for this sample.
    if (problem.task == Task::kRegression) {
      double prediction = 0.0;
      const double* values = problem.values.data() + s * T;
      for (std::size_t k = 0; k < T; ++k)
        prediction += ((1.0 - eps) * D[k] + eps * w[k]) * values[k];
      const double err = problem.targets[s] - prediction;
      loss += err * err;
      for (std::size_t k = 0; k < T; ++k) gamma[k] = -2.0 * err * values[k];
    } else {
      const double* dists = problem.class_dists.data() + s * T * C;
      std::fill(gamma.begin(), gamma.end(), 0.0);
      for (std::size_t c = 0; c < C; ++c) {
        double prob = 0.0;
        for (std::size_t k = 0; k < T; ++k)
          prob += ((1.0 - eps) * D[k] + eps * w[k]) * dists[k * C + c];
        const double one_hot = static_cast<std::size_t>(problem.labels[s]) == c ? 1.0 : 0.0;
        const double err = one_hot - prob;
        loss += err * err;
        for (std::size_t k = 0; k < T; ++k) gamma[k] += -2.0 * err * dists[k * C + c];
      }
    }

    // Through the per-sample softmax: dL/dscore_k = (1-eps) D_k (gamma_k - D.gamma).
    double mixed = 0.0;
    for (std::size_t k = 0; k < T; ++k) mixed += D[k] * gamma[k];
    for (std::size_t k = 0; k < T; ++k) score_grad[k] = (1.0 - eps) * D[k] * (gamma[k] - mixed);

    for (std::size_t k = 0; k < T; ++k) {
      grad_v[k] += score_grad[k] * direction * u[k] / 2.0;
      grad_w[k] += eps * gamma[k];
      const double du_factor = score_grad[k] * direction * v[k];  // dL/du_k * 2
      if (du_factor != 0.0) {
        const double* dk = diffs + k * m;
        for (std::size_t j = 0; j < m; ++j)
          grad_z_direct[j] += du_factor * z[j] * dk[j] * dk[j];
      }
    }
  }

  GradientEval eval;
  eval.loss = loss;
  eval.grad_v = logit_gradient(v, grad_v);
  eval.grad_z = logit_gradient(z, grad_z_direct);
  eval.grad_w = logit_gradient(w, grad_w);
  return eval;
}

TrainResult train_gradient(const GradientProblem& problem, const AttentionParams& init,
                           const GradConfig& config) {
  if (!(config.learning_rate > 0.0)) throw Error("train_gradient: learning_rate must be > 0");
  if (config.max_iters < 1) throw Error("train_gradient: max_iters must be >= 1");
  if (!(config.tolerance > 0.0)) throw Error("train_gradient: tolerance must be > 0");
  if (problem.n < 1) throw Error("train_gradient: empty problem");

  GradientState state;
  state.logits_v = logits_from_simplex(init.v, problem.n_trees);
  state.logits_z = logits_from_simplex(init.z, problem.n_features);
  state.logits_w = logits_from_simplex(init.w, problem.n_trees);

  TrainResult result;
  double best_loss = std::numeric_limits<double>::infinity();
  GradientState best = state;
  double previous_loss = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
    const GradientEval eval = eval_gradient(problem, state);
    if (!std::isfinite(eval.loss))
      throw Error("train_gradient: loss diverged at iteration " + std::to_string(iter));
    result.trace.push_back(eval.loss);
    if (iter == 0) result.initial_loss = eval.loss;
    if (eval.loss < best_loss) {
      best_loss = eval.loss;
      best = state;
    }
    result.iterations = iter + 1;
    if (iter > 0 && std::abs(previous_loss - eval.loss) < config.tolerance) break;
    previous_loss = eval.loss;

    if (config.train_v)
      for (std::size_t i = 0; i < state.logits_v.size(); ++i)
        state.logits_v[i] -= config.learning_rate * eval.grad_v[i];
    if (config.train_z)
      for (std::size_t i = 0; i < state.logits_z.size(); ++i)
        state.logits_z[i] -= config.learning_rate * eval.grad_z[i];
    if (config.train_w)
      for (std::size_t i = 0; i < state.logits_w.size(); ++i)
        state.logits_w[i] -= config.learning_rate * eval.grad_w[i];
  }

  result.final_loss = best_loss;
  result.params.epsilon = problem.epsilon;
  result.params.tau = init.tau;
  result.params.sign = problem.sign;
  result.params.v = softmax_of_logits(best.logits_v);
  result.params.z = softmax_of_logits(best.logits_z);
  result.params.w = softmax_of_logits(best.logits_w);
  return result;
}

TrainResult train_gradient(const Forest& forest, const Dataset& ds,
                           const AttentionParams& init, const GradConfig& config) {
  const GradientProblem problem = make_gradient_problem(forest, ds, init.epsilon, init.sign);
  return train_gradient(problem, init, config);
}

}  // namespace abrf
