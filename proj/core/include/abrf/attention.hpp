#pragma once

#include <span>
#include <utility>
#include <vector>

#include "abrf/forest.hpp"

namespace abrf {

// Sign of the squared distance inside the softmax. The negative exponent
// assigns larger weight to trees with smaller distance; the positive
// variant reproduces the formulas as literally printed.
enum class SoftmaxSign { kNegative, kPositive };

std::string to_string(SoftmaxSign s);
SoftmaxSign softmax_sign_from_string(const std::string& name);

// Trainable attention state: contamination rate, softmax temperature, and
// the three simplex-constrained vectors (tree bias w, tree scales v,
// feature weights z). Unused vectors stay empty.
struct AttentionParams {
  double epsilon = 0.0;
  double tau = 1.0;
  std::vector<double> w;  // length T
  std::vector<double> v;  // length T
  std::vector<double> z;  // length m
  SoftmaxSign sign = SoftmaxSign::kNegative;

  void validate(std::size_t n_trees, std::size_t n_features) const;
};

// Checks nonnegativity and unit sum within tol; throws on violation.
void assert_simplex(std::span<const double> p, double tol = 1e-9);

std::vector<double> uniform_simplex(std::size_t size);

// Softmax scores D_k = softmax(sign * d_k / (2 tau)). Max-shifted; distances
// capped at 1e30 before exponentiation.
std::vector<double> softmax_scores(std::span<const double> distances, double tau,
                                   SoftmaxSign sign = SoftmaxSign::kNegative);

// Contamination mixture alpha_k = (1 - eps) D_k + eps w_k. The output is a
// simplex point by construction and is never renormalized.
std::vector<double> contaminate(std::span<const double> scores,
                                std::span<const double> w, double epsilon);

// Trainable-softmax weights alpha = softmax(sign * d_k v_k / 2); the panel
// must have been built with the same feature weights z.
std::vector<double> abrf2_weights(const InstancePanel& panel, std::span<const double> v,
                                  SoftmaxSign sign = SoftmaxSign::kNegative);

// Combination: (1 - eps) * abrf2 + eps * w.
std::vector<double> abrf3_weights(const InstancePanel& panel, const AttentionParams& params);

double predict_regression(std::span<const double> alpha, std::span<const double> values);

// class_dists is a T x C row-stochastic matrix, row k = p_k(x).
std::pair<std::vector<double>, int> predict_classification(
    std::span<const double> alpha, std::span<const double> class_dists, std::size_t n_classes);

}  // namespace abrf
