#include <doctest.h>

#include <cmath>

#include "abrf/attention.hpp"
#include "abrf/rng.hpp"

using namespace abrf;

TEST_CASE("softmax scores: equal distances give the uniform vector") {
  const std::vector<double> d(7, 3.5);
  const std::vector<double> s = softmax_scores(d, 2.0);
  for (double v : s) CHECK(v == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("softmax scores match the hand-evaluated two-tree case") {
  // d = (0, 2), tau = 1: D = (1, e^-1) normalized.
  const std::vector<double> s = softmax_scores(std::vector<double>{0.0, 2.0}, 1.0);
  CHECK(s[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.2689414213699951).epsilon(1e-12));
}

TEST_CASE("softmax scores flatten to uniform as tau grows") {
  const std::vector<double> d{0.0, 5.0, 17.0};
  const std::vector<double> s = softmax_scores(d, 1e12);
  for (double v : s) CHECK(std::abs(v - 1.0 / 3.0) < 1e-9);
}

TEST_CASE("softmax scores are shift-invariant and monotone in the distance") {
  const std::vector<double> d{0.5, 1.5, 4.0};
  const std::vector<double> shifted{10.5, 11.5, 14.0};
  const std::vector<double> a = softmax_scores(d, 0.7);
  const std::vector<double> b = softmax_scores(shifted, 0.7);
  for (std::size_t k = 0; k < d.size(); ++k)
    CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
  // Increasing one distance strictly lowers its own weight.
  std::vector<double> bumped = d;
  bumped[1] += 0.25;
  const std::vector<double> c = softmax_scores(bumped, 0.7);
  CHECK(c[1] < a[1]);
}

TEST_CASE("positive sign reproduces the literal formula") {
  const std::vector<double> d{0.0, 2.0};
  const std::vector<double> s = softmax_scores(d, 1.0, SoftmaxSign::kPositive);
  // exp(0) and exp(1): larger distance now gets the larger weight.
  CHECK(s[1] > s[0]);
  CHECK(s[1] == doctest::Approx(std::exp(1.0) / (1.0 + std::exp(1.0))).epsilon(1e-12));
}

TEST_CASE("softmax caps huge distances instead of overflowing") {
  const std::vector<double> d{0.0, 1e308};
  const std::vector<double> s = softmax_scores(d, 1.0);
  CHECK(std::isfinite(s[0]));
  CHECK(s[0] == doctest::Approx(1.0));
}

TEST_CASE("contaminate endpoints and hand case") {
  const std::vector<double> D{0.5, 0.5};
  const std::vector<double> w{1.0, 0.0};
  CHECK(contaminate(D, w, 0.0) == D);
  CHECK(contaminate(D, w, 1.0) == w);
  const std::vector<double> mixed = contaminate(D, w, 0.5);
  CHECK(mixed[0] == doctest::Approx(0.75));
  CHECK(mixed[1] == doctest::Approx(0.25));
}

TEST_CASE("contaminate is affine in epsilon") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> d(5), w_raw(5);
    for (auto& v : d) v = rng.uniform(0.0, 10.0);
    for (auto& v : w_raw) v = rng.next_double() + 0.01;
    double sum = 0.0;
    for (double v : w_raw) sum += v;
    for (auto& v : w_raw) v /= sum;
    const std::vector<double> D = softmax_scores(d, 1.0);
    const double eps = rng.next_double();
    const std::vector<double> at_eps = contaminate(D, w_raw, eps);
    const std::vector<double> at0 = contaminate(D, w_raw, 0.0);
    const std::vector<double> at1 = contaminate(D, w_raw, 1.0);
    for (std::size_t k = 0; k < 5; ++k)
      CHECK(at_eps[k] == doctest::Approx((1 - eps) * at0[k] + eps * at1[k]).epsilon(1e-15));
  }
}

namespace {

InstancePanel panel_with_distances(std::vector<double> distances) {
  InstancePanel p;
  p.n_trees = distances.size();
  p.distances = std::move(distances);
  return p;
}

}  // namespace

TEST_CASE("abrf2 weights: uniform v and equal distances give uniform alpha") {
  const InstancePanel p = panel_with_distances({2.0, 2.0, 2.0});
  const std::vector<double> alpha = abrf2_weights(p, uniform_simplex(3));
  for (double a : alpha) CHECK(a == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("abrf2 weights: zero v component zeroes that tree's score") {
  const InstancePanel p = panel_with_distances({50.0, 1234.5});
  const std::vector<double> v{1.0, 0.0};
  const std::vector<double> alpha = abrf2_weights(p, v);
  // Tree 2's score is exactly 0 regardless of its distance.
  const double s1 = std::exp(-50.0 / 2.0);
  CHECK(alpha[1] == doctest::Approx(1.0 / (1.0 + s1)).epsilon(1e-12));
}

TEST_CASE("abrf2 weights match the hand-evaluated softmax") {
  // Weighted distances (1, 4), v = (1/2, 1/2): softmax(-0.25, -1.0).
  const InstancePanel p = panel_with_distances({1.0, 4.0});
  const std::vector<double> alpha = abrf2_weights(p, uniform_simplex(2));
  const double e0 = std::exp(-0.25), e1 = std::exp(-1.0);
  CHECK(alpha[0] == doctest::Approx(e0 / (e0 + e1)).epsilon(1e-12));
  CHECK(alpha[0] == doctest::Approx(0.6792).epsilon(1e-4));
  CHECK(alpha[1] == doctest::Approx(0.3208).epsilon(1e-4));
}

TEST_CASE("abrf3 weights reduce to the pure cases at the epsilon endpoints") {
  const InstancePanel p = panel_with_distances({0.5, 2.0, 9.0});
  AttentionParams params;
  params.v = {0.2, 0.3, 0.5};
  params.z = uniform_simplex(4);
  params.w = {0.6, 0.3, 0.1};

  params.epsilon = 1.0;
  CHECK(abrf3_weights(p, params) == params.w);

  params.epsilon = 0.0;
  CHECK(abrf3_weights(p, params) == abrf2_weights(p, params.v));

  params.epsilon = 0.5;
  const std::vector<double> mixed = abrf3_weights(p, params);
  const std::vector<double> inner = abrf2_weights(p, params.v);
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(mixed[k] == doctest::Approx(0.5 * inner[k] + 0.5 * params.w[k]).epsilon(1e-15));
}

TEST_CASE("predict_regression is the weighted sum of tree values") {
  CHECK(predict_regression(std::vector<double>{1.0, 0.0}, std::vector<double>{4.0, 9.0}) ==
        4.0);
  CHECK(predict_regression(std::vector<double>{0.75, 0.25}, std::vector<double>{2.0, 6.0}) ==
        doctest::Approx(3.0));
}

TEST_CASE("predict_classification combines rows and breaks ties low") {
  const std::vector<double> rows{0.8, 0.2, 0.2, 0.8};
  auto [dist, label] = predict_classification(std::vector<double>{0.25, 0.75}, rows, 2);
  CHECK(dist[0] == doctest::Approx(0.35));
  CHECK(dist[1] == doctest::Approx(0.65));
  CHECK(label == 1);

  auto [d2, l2] = predict_classification(std::vector<double>{1.0, 0.0}, rows, 2);
  CHECK(d2[0] == doctest::Approx(0.8));
  CHECK(l2 == 0);
}

TEST_CASE("every produced weight vector stays on the simplex") {
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t T = 1 + rng.below(12);
    std::vector<double> d(T);
    for (auto& v : d) v = rng.uniform(0.0, 50.0);
    const double tau = std::exp(rng.uniform(-3.0, 3.0));
    const std::vector<double> D = softmax_scores(d, tau);
    assert_simplex(D, 1e-9);

    std::vector<double> w(T);
    double sum = 0.0;
    for (auto& v : w) {
      v = rng.next_double() + 1e-3;
      sum += v;
    }
    for (auto& v : w) v /= sum;
    const std::vector<double> alpha = contaminate(D, w, rng.next_double());
    assert_simplex(alpha, 1e-9);

    InstancePanel p;
    p.n_trees = T;
    p.distances = d;
    assert_simplex(abrf2_weights(p, w), 1e-9);
  }
}

TEST_CASE("prediction of row-stochastic inputs is itself a distribution") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t T = 1 + rng.below(6);
    const std::size_t C = 2 + rng.below(4);
    std::vector<double> rows(T * C);
    for (std::size_t k = 0; k < T; ++k) {
      double sum = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        rows[k * C + c] = rng.next_double() + 0.01;
        sum += rows[k * C + c];
      }
      for (std::size_t c = 0; c < C; ++c) rows[k * C + c] /= sum;
    }
    std::vector<double> d(T);
    for (auto& v : d) v = rng.uniform(0.0, 4.0);
    const std::vector<double> alpha = softmax_scores(d, 1.0);
    auto [dist, label] = predict_classification(alpha, rows, C);
    double sum = 0.0;
    for (double p : dist) sum += p;
    CHECK(std::abs(sum - 1.0) < 1e-12);
    CHECK(label >= 0);
    CHECK(label < static_cast<int>(C));
  }
}

TEST_CASE("attention params validation catches bad vectors") {
  AttentionParams params;
  params.epsilon = 0.5;
  params.tau = 1.0;
  params.w = {0.5, 0.6};  // sums to 1.1
  CHECK_THROWS_AS(params.validate(2, 3), Error);
  params.w = {0.5, 0.5};
  CHECK_NOTHROW(params.validate(2, 3));
  params.epsilon = 1.5;
  CHECK_THROWS_AS(params.validate(2, 3), Error);
}
