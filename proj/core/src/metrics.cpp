#include "abrf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace abrf {

double r2(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) throw Error("r2: size mismatch");
  if (y_true.size() < 2) throw Error("r2: need at least 2 samples");
  double mean = 0.0;
  for (double y : y_true) mean += y;
  mean /= static_cast<double>(y_true.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
  }
  if (ss_tot == 0.0) throw Error("r2: y_true is constant");
  return 1.0 - ss_res / ss_tot;
}

double mae(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) throw Error("mae: size mismatch");
  if (y_true.empty()) throw Error("mae: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) sum += std::abs(y_true[i] - y_pred[i]);
  return sum / static_cast<double>(y_true.size());
}

F1Average f1_average_from_string(const std::string& name) {
  if (name == "macro") return F1Average::kMacro;
  if (name == "micro") return F1Average::kMicro;
  if (name == "weighted") return F1Average::kWeighted;
  throw Error("unknown f1 average '" + name + "' (expected macro|micro|weighted)");
}

std::string to_string(F1Average avg) {
  switch (avg) {
    case F1Average::kMacro: return "macro";
    case F1Average::kMicro: return "micro";
    default: return "weighted";
  }
}

double f1(std::span<const int> y_true, std::span<const int> y_pred, int n_classes,
          F1Average average) {
  if (y_true.size() != y_pred.size()) throw Error("f1: size mismatch");
  if (y_true.empty()) throw Error("f1: empty input");
  if (n_classes < 2) throw Error("f1: need at least 2 classes");
  const auto C = static_cast<std::size_t>(n_classes);
  std::vector<double> tp(C, 0.0), fp(C, 0.0), fn(C, 0.0), support(C, 0.0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i], p = y_pred[i];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes)
      throw Error("f1: label out of range");
    support[static_cast<std::size_t>(t)] += 1.0;
    if (t == p) {
      tp[static_cast<std::size_t>(t)] += 1.0;
    } else {
      fp[static_cast<std::size_t>(p)] += 1.0;
      fn[static_cast<std::size_t>(t)] += 1.0;
    }
  }
  if (average == F1Average::kMicro) {
    double tp_sum = 0.0, fp_sum = 0.0, fn_sum = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      tp_sum += tp[c];
      fp_sum += fp[c];
      fn_sum += fn[c];
    }
    const double denom = 2.0 * tp_sum + fp_sum + fn_sum;
    return denom > 0.0 ? 2.0 * tp_sum / denom : 0.0;
  }
  double total = 0.0, weight_sum = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    const double denom = 2.0 * tp[c] + fp[c] + fn[c];
    const double score = denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
    if (average == F1Average::kMacro) {
      total += score;
      weight_sum += 1.0;
    } else {
      total += score * support[c];
      weight_sum += support[c];
    }
  }
  return weight_sum > 0.0 ? total / weight_sum : 0.0;
}

std::vector<std::pair<double, double>> kde_weights(std::span<const double> alpha,
                                                   std::span<const double> grid) {
  if (alpha.empty()) throw Error("kde_weights: empty weight vector");
  constexpr double kInvSqrt2Pi = 0.3989422804014326779;
  std::vector<std::pair<double, double>> curve;
  curve.reserve(grid.size());
  for (double t : grid) {
    if (!std::isfinite(t)) throw Error("kde_weights: non-finite grid point");
    double density = 0.0;
    for (double a : alpha) {
      const double u = t - a;
      density += kInvSqrt2Pi * std::exp(-0.5 * u * u);
    }
    curve.emplace_back(t, density / static_cast<double>(alpha.size()));
  }
  return curve;
}

void write_kde_csv(std::span<const std::pair<double, double>> curve,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << "t,rho\n";
  char buf[96];
  for (const auto& [t, rho] : curve) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t, rho);
    out << buf;
  }
}

void EvalReport::finalize() {
  const std::size_t n = per_repetition.size();
  if (n == 0) return;
  mean = 0.0;
  for (double v : per_repetition) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : per_repetition) ss += (v - mean) * (v - mean);
  stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  if (!per_repetition_mae.empty()) {
    mae_mean = 0.0;
    for (double v : per_repetition_mae) mae_mean += v;
    mae_mean /= static_cast<double>(per_repetition_mae.size());
  }
}

}  // namespace abrf
