#include "abrf/attention.hpp"

#include <algorithm>
#include <cmath>

namespace abrf {

std::string to_string(SoftmaxSign s) {
  return s == SoftmaxSign::kNegative ? "negative" : "positive";
}

SoftmaxSign softmax_sign_from_string(const std::string& name) {
  if (name == "negative" || name == "neg") return SoftmaxSign::kNegative;
  if (name == "positive" || name == "pos") return SoftmaxSign::kPositive;
  throw Error("unknown softmax sign '" + name + "' (expected negative|positive)");
}

void assert_simplex(std::span<const double> p, double tol) {
  if (p.empty()) throw Error("simplex vector is empty");
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= -tol)) throw Error("simplex violation: negative component");
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol)
    throw Error("simplex violation: components sum to " + std::to_string(sum));
}

std::vector<double> uniform_simplex(std::size_t size) {
  return std::vector<double>(size, 1.0 / static_cast<double>(size));
}

void AttentionParams::validate(std::size_t n_trees, std::size_t n_features) const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error("epsilon must be in [0, 1]");
  if (!(tau > 0.0)) throw Error("tau must be > 0");
  if (!w.empty()) {
    if (w.size() != n_trees) throw Error("w has wrong length");
    assert_simplex(w);
  }
  if (!v.empty()) {
    if (v.size() != n_trees) throw Error("v has wrong length");
    assert_simplex(v);
  }
  if (!z.empty()) {
    if (z.size() != n_features) throw Error("z has wrong length");
    assert_simplex(z);
  }
}

namespace {

constexpr double kDistanceCap = 1e30;

std::vector<double> softmax_of_scores(std::vector<double> scores) {
  const double peak = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - peak);
    sum += s;
  }
  for (double& s : scores) s /= sum;
  return scores;
}

}  // namespace

std::vector<double> softmax_scores(std::span<const double> distances, double tau,
                                   SoftmaxSign sign) {
  if (distances.empty()) throw Error("softmax_scores: empty distance vector");
  if (!(tau > 0.0)) throw Error("softmax_scores: tau must be > 0");
  const double direction = sign == SoftmaxSign::kNegative ? -1.0 : 1.0;
  std::vector<double> scores(distances.size());
  for (std::size_t k = 0; k < distances.size(); ++k) {
    if (!std::isfinite(distances[k]) || distances[k] < 0.0)
      throw Error("softmax_scores: distances must be finite and nonnegative");
    scores[k] = direction * std::min(distances[k], kDistanceCap) / (2.0 * tau);
  }
  return softmax_of_scores(std::move(scores));
}

std::vector<double> contaminate(std::span<const double> scores,
                                std::span<const double> w, double epsilon) {
  if (scores.size() != w.size()) throw Error("contaminate: size mismatch");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error("contaminate: epsilon not in [0, 1]");
  std::vector<double> alpha(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k)
    alpha[k] = (1.0 - epsilon) * scores[k] + epsilon * w[k];
  return alpha;
}

std::vector<double> abrf2_weights(const InstancePanel& panel, std::span<const double> v,
                                  SoftmaxSign sign) {
  if (v.size() != panel.n_trees) throw Error("abrf2_weights: v has wrong length");
  const double direction = sign == SoftmaxSign::kNegative ? -1.0 : 1.0;
  std::vector<double> scores(panel.n_trees);
  for (std::size_t k = 0; k < panel.n_trees; ++k)
    scores[k] = direction * std::min(panel.distances[k], kDistanceCap) * v[k] / 2.0;
  return softmax_of_scores(std::move(scores));
}

std::vector<double> abrf3_weights(const InstancePanel& panel, const AttentionParams& params) {
  const std::vector<double> inner = abrf2_weights(panel, params.v, params.sign);
  return contaminate(inner, params.w, params.epsilon);
}

double predict_regression(std::span<const double> alpha, std::span<const double> values) {
  if (alpha.size() != values.size()) throw Error("predict_regression: size mismatch");
  double y = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) y += alpha[k] * values[k];
  return y;
}

std::pair<std::vector<double>, int> predict_classification(
    std::span<const double> alpha, std::span<const double> class_dists,
    std::size_t n_classes) {
  if (n_classes < 1 || class_dists.size() != alpha.size() * n_classes)
    throw Error("predict_classification: size mismatch");
  std::vector<double> dist(n_classes, 0.0);
  for (std::size_t k = 0; k < alpha.size(); ++k)
    for (std::size_t c = 0; c < n_classes; ++c)
      dist[c] += alpha[k] * class_dists[k * n_classes + c];
  const int label = argmax_label(dist);
  return {std::move(dist), label};
}

}  // namespace abrf
