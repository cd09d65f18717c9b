#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "abrf/solver.hpp"

namespace abrf {

std::vector<double> project_simplex(std::span<const double> y) {
  if (y.empty()) throw Error("project_simplex: empty input");
  for (double v : y)
    if (!std::isfinite(v)) throw Error("project_simplex: non-finite input");

  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  std::size_t support = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) {
      theta = candidate;
      support = k + 1;
    }
  }
  (void)support;
  std::vector<double> out(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) out[k] = std::max(0.0, y[k] - theta);
  return out;
}

namespace {

// Largest eigenvalue of the symmetric PSD matrix H (T x T) by power
// iteration; deterministic start, small safety margin on top.
double spectral_bound(const std::vector<double>& H, std::size_t T) {
  std::vector<double> vec(T, 1.0 / std::sqrt(static_cast<double>(T)));
  std::vector<double> next(T, 0.0);
  double eigen = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    for (std::size_t i = 0; i < T; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < T; ++j) sum += H[i * T + j] * vec[j];
      next[i] = sum;
    }
    double norm = 0.0;
    for (double v : next) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (std::size_t i = 0; i < T; ++i) next[i] /= norm;
    double rayleigh = 0.0;
    for (std::size_t i = 0; i < T; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < T; ++j) sum += H[i * T + j] * next[j];
      rayleigh += next[i] * sum;
    }
    vec.swap(next);
    if (iter > 4 && std::abs(rayleigh - eigen) <= 1e-12 * std::max(1.0, rayleigh)) {
      eigen = rayleigh;
      break;
    }
    eigen = rayleigh;
  }
  return eigen * 1.05;
}

}  // namespace

QpResult solve_qp(const QpInstance& inst, const QpOptions& options) {
  const std::size_t T = inst.n_trees;
  const std::size_t rows = inst.rows;
  if (T < 1 || rows < 1) throw Error("solve_qp: empty instance");
  if (inst.V.size() != rows * T || inst.r.size() != rows)
    throw Error("solve_qp: inconsistent dimensions");
  for (double v : inst.V)
    if (!std::isfinite(v)) throw Error("solve_qp: non-finite V entry");
  for (double v : inst.r)
    if (!std::isfinite(v)) throw Error("solve_qp: non-finite residual entry");
  if (!(inst.epsilon >= 0.0 && inst.epsilon <= 1.0))
    throw Error("solve_qp: epsilon must be in [0, 1]");

  QpResult result;

  // eps = 0: w does not enter the objective; report the fixed value.
  if (inst.epsilon == 0.0) {
    result.w = uniform_simplex(T);
    double obj = 0.0;
    for (double v : inst.r) obj += v * v;
    result.objective = obj;
    return result;
  }

  // Normalize so the stationarity measure and step sizes are scale-free:
  // divide V and r by the largest magnitude and average over rows.
  double scale = 1.0;
  for (double v : inst.V) scale = std::max(scale, std::abs(v));
  for (double v : inst.r) scale = std::max(scale, std::abs(v));
  const double row_count = static_cast<double>(rows);
  const double eps = inst.epsilon;

  // Normalized quadratic form: f(w) = rr - 2 eps b.w + eps^2 w.H w.
  std::vector<double> H(T * T, 0.0), b(T, 0.0);
  double rr = 0.0;
  for (std::size_t s = 0; s < rows; ++s) {
    const double* row = inst.V.data() + s * T;
    const double rs = inst.r[s] / scale;
    rr += rs * rs;
    for (std::size_t i = 0; i < T; ++i) {
      const double vi = row[i] / scale;
      b[i] += vi * rs;
      for (std::size_t j = i; j < T; ++j) H[i * T + j] += vi * (row[j] / scale);
    }
  }
  rr /= row_count;
  for (std::size_t i = 0; i < T; ++i) {
    b[i] /= row_count;
    for (std::size_t j = i; j < T; ++j) {
      H[i * T + j] /= row_count;
      H[j * T + i] = H[i * T + j];
    }
  }

  const double lipschitz = std::max(2.0 * eps * eps * spectral_bound(H, T), 1e-300);
  const double step = 1.0 / lipschitz;

  auto gradient = [&](const std::vector<double>& w, std::vector<double>& g) {
    for (std::size_t i = 0; i < T; ++i) {
      double hw = 0.0;
      for (std::size_t j = 0; j < T; ++j) hw += H[i * T + j] * w[j];
      g[i] = 2.0 * eps * eps * hw - 2.0 * eps * b[i];
    }
  };
  auto objective = [&](const std::vector<double>& w) {
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < T; ++i) {
      double hw = 0.0;
      for (std::size_t j = 0; j < T; ++j) hw += H[i * T + j] * w[j];
      quad += w[i] * hw;
      lin += b[i] * w[i];
    }
    return rr - 2.0 * eps * lin + eps * eps * quad;
  };

  std::vector<double> w = uniform_simplex(T);
  std::vector<double> g(T), shifted(T);
  if (options.record_trace) result.trace.push_back(objective(w));

  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    gradient(w, g);
    for (std::size_t i = 0; i < T; ++i) shifted[i] = w[i] - step * g[i];
    std::vector<double> next = project_simplex(shifted);
    double delta = 0.0;
    for (std::size_t i = 0; i < T; ++i) delta = std::max(delta, std::abs(next[i] - w[i]));
    w.swap(next);
    ++result.iterations;
    if (options.record_trace) result.trace.push_back(objective(w));
    if (delta < options.tolerance) break;
  }

  // Gradient-mapping norm at the final point (normalized problem).
  gradient(w, g);
  for (std::size_t i = 0; i < T; ++i) shifted[i] = w[i] - step * g[i];
  const std::vector<double> mapped = project_simplex(shifted);
  double residual = 0.0;
  for (std::size_t i = 0; i < T; ++i)
    residual = std::max(residual, std::abs(w[i] - mapped[i]));
  result.kkt_residual = residual * lipschitz;

  const double normalized_obj = objective(w);
  result.objective = normalized_obj * row_count * scale * scale;
  if (!std::isfinite(result.objective)) throw Error("solve_qp: non-finite objective");
  if (options.record_trace)
    for (double& t : result.trace) t *= row_count * scale * scale;
  result.w = std::move(w);
  return result;
}

std::vector<InstancePanel> compute_panels(const Forest& forest, const Dataset& ds,
                                          std::span<const double> z) {
  std::vector<InstancePanel> panels;
  panels.reserve(ds.n);
  for (std::size_t i = 0; i < ds.n; ++i) panels.push_back(panel(forest, ds.row(i), z));
  return panels;
}

QpInstance make_qp_instance(std::span<const InstancePanel> panels,
                            std::span<const double> targets, double epsilon, double tau,
                            SoftmaxSign sign) {
  if (panels.empty() || panels.size() != targets.size())
    throw Error("make_qp_instance: panel/target size mismatch");
  const std::size_t n = panels.size();
  const std::size_t T = panels[0].n_trees;
  QpInstance inst;
  inst.rows = n;
  inst.n_trees = T;
  inst.epsilon = epsilon;
  inst.V.resize(n * T);
  inst.r.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::vector<double> scores = softmax_scores(panels[s].distances, tau, sign);
    double weighted = 0.0;
    for (std::size_t k = 0; k < T; ++k) {
      inst.V[s * T + k] = panels[s].values[k];
      weighted += scores[k] * panels[s].values[k];
    }
    inst.r[s] = targets[s] - (1.0 - epsilon) * weighted;
  }
  return inst;
}

QpInstance make_qp_instance_classification(std::span<const InstancePanel> panels,
                                           std::span<const int> labels, int n_classes,
                                           double epsilon, double tau, SoftmaxSign sign) {
  if (panels.empty() || panels.size() != labels.size())
    throw Error("make_qp_instance_classification: panel/label size mismatch");
  if (n_classes < 2) throw Error("make_qp_instance_classification: need C >= 2");
  const std::size_t n = panels.size();
  const std::size_t T = panels[0].n_trees;
  const auto C = static_cast<std::size_t>(n_classes);
  QpInstance inst;
  inst.rows = n * C;
  inst.n_trees = T;
  inst.epsilon = epsilon;
  inst.V.resize(inst.rows * T);
  inst.r.resize(inst.rows);
  for (std::size_t s = 0; s < n; ++s) {
    const std::vector<double> scores = softmax_scores(panels[s].distances, tau, sign);
    for (std::size_t c = 0; c < C; ++c) {
      const std::size_t row = s * C + c;
      const double one_hot = static_cast<std::size_t>(labels[s]) == c ? 1.0 : 0.0;
      double weighted = 0.0;
      for (std::size_t k = 0; k < T; ++k) {
        const double p = panels[s].class_dists[k * C + c];
        inst.V[row * T + k] = p;
        weighted += scores[k] * p;
      }
      inst.r[row] = one_hot - (1.0 - epsilon) * weighted;
    }
  }
  return inst;
}

QpResult solve_qp_classification(const Forest& forest, const Dataset& ds, double epsilon,
                                 double tau, const QpOptions& options) {
  if (ds.task != Task::kClassification)
    throw Error("solve_qp_classification: dataset is not a classification task");
  const std::vector<InstancePanel> panels = compute_panels(forest, ds);
  const QpInstance inst = make_qp_instance_classification(panels, ds.labels,
                                                          ds.num_classes, epsilon, tau);
  return solve_qp(inst, options);
}

LpInstance make_lp_instance(std::span<const InstancePanel> panels,
                            std::span<const double> targets, double epsilon, double tau,
                            SoftmaxSign sign) {
  const QpInstance qp = make_qp_instance(panels, targets, epsilon, tau, sign);
  LpInstance inst;
  inst.n = qp.rows;
  inst.n_trees = qp.n_trees;
  inst.V = qp.V;
  inst.Q = qp.r;
  inst.epsilon = epsilon;
  return inst;
}

void write_trace_csv(std::span<const double> trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << "iteration,objective\n";
  char buf[40];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", trace[i]);
    out << i << ',' << buf << '\n';
  }
}

}  // namespace abrf
