#include <doctest.h>

#include <cmath>

#include "abrf/metrics.hpp"
#include "abrf/rng.hpp"

using namespace abrf;

TEST_CASE("r2 basics") {
  const std::vector<double> y{1.0, 2.0, 3.0};
  CHECK(r2(y, y) == doctest::Approx(1.0));
  const std::vector<double> mean_pred(3, 2.0);
  CHECK(r2(y, mean_pred) == doctest::Approx(0.0));
  const std::vector<double> off{1.0, 2.0, 4.0};
  CHECK(r2(y, off) == doctest::Approx(0.5));
  CHECK_THROWS_AS(r2(std::vector<double>{5.0, 5.0}, std::vector<double>{5.0, 4.0}), Error);
  CHECK_THROWS_AS(r2(std::vector<double>{1.0}, std::vector<double>{1.0}), Error);
}

TEST_CASE("r2 never exceeds one") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> y(10), p(10);
    for (auto& v : y) v = rng.normal();
    for (auto& v : p) v = rng.normal();
    CHECK(r2(y, p) <= 1.0);
  }
}

TEST_CASE("mae basics") {
  const std::vector<double> y{1.0, 2.0, 3.0};
  CHECK(mae(y, y) == 0.0);
  CHECK(mae(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, -1.0}) ==
        doctest::Approx(1.0));
  CHECK(mae(y, std::vector<double>{2.0, 2.0, 5.0}) == doctest::Approx(1.0));
}

TEST_CASE("macro f1 matches hand-computed confusion cases") {
  // Perfect predictions.
  const std::vector<int> truth{0, 1, 0, 1};
  CHECK(f1(truth, truth, 2) == doctest::Approx(1.0));

  // Everything predicted as class 0 with balanced truth:
  // class 0 F1 = 2/3, class 1 F1 = 0, macro = 1/3.
  const std::vector<int> all_zero{0, 0, 0, 0};
  CHECK(f1(truth, all_zero, 2) == doctest::Approx(1.0 / 3.0));

  // Three-class case by hand: truth (0,0,1,1,2,2), pred (0,1,1,2,2,2).
  // tp = (1,1,2); fp = (0,1,2... ) per class:
  //   class0: tp=1, fp=0, fn=1 -> F1 = 2/3
  //   class1: tp=1, fp=1, fn=1 -> F1 = 1/2
  //   class2: tp=2, fp=1, fn=0 -> F1 = 4/5
  const std::vector<int> t3{0, 0, 1, 1, 2, 2};
  const std::vector<int> p3{0, 1, 1, 2, 2, 2};
  CHECK(f1(t3, p3, 3) == doctest::Approx((2.0 / 3.0 + 0.5 + 0.8) / 3.0));
}

TEST_CASE("micro and weighted f1 variants differ as expected") {
  const std::vector<int> t{0, 0, 0, 1};
  const std::vector<int> p{0, 0, 0, 0};
  // micro = accuracy here = 3/4; weighted favors the frequent class.
  CHECK(f1(t, p, 2, F1Average::kMicro) == doctest::Approx(0.75));
  const double f0 = 2.0 * 3.0 / (2.0 * 3.0 + 1.0);  // tp=3, fp=1, fn=0
  CHECK(f1(t, p, 2, F1Average::kWeighted) == doctest::Approx(f0 * 0.75));
  CHECK(f1(t, p, 2, F1Average::kMacro) == doctest::Approx(f0 / 2.0));
}

TEST_CASE("metrics are permutation invariant") {
  Rng rng(14);
  std::vector<double> y(20), p(20);
  for (auto& v : y) v = rng.normal();
  for (auto& v : p) v = rng.normal();
  std::vector<double> y2(y.rbegin(), y.rend());
  std::vector<double> p2(p.rbegin(), p.rend());
  CHECK(r2(y, p) == doctest::Approx(r2(y2, p2)).epsilon(1e-12));
  CHECK(mae(y, p) == doctest::Approx(mae(y2, p2)).epsilon(1e-12));
}

TEST_CASE("kde of a single unit weight is the shifted normal density") {
  const std::vector<double> alpha{1.0};
  const std::vector<double> grid{-1.0, 0.0, 0.5, 1.0, 2.0};
  const auto curve = kde_weights(alpha, grid);
  constexpr double inv_sqrt_2pi = 0.3989422804014327;
  for (const auto& [t, rho] : curve) {
    const double expected = inv_sqrt_2pi * std::exp(-0.5 * (t - 1.0) * (t - 1.0));
    CHECK(rho == doctest::Approx(expected).epsilon(1e-12));
    CHECK(rho >= 0.0);
  }
}

TEST_CASE("kde integrates to one over a wide grid") {
  const std::vector<double> alpha{0.1, 0.2, 0.3, 0.4};
  std::vector<double> grid;
  for (double t = -6.0; t <= 7.0; t += 0.01) grid.push_back(t);
  const auto curve = kde_weights(alpha, grid);
  double integral = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    integral += 0.5 * (curve[i].second + curve[i - 1].second) *
                (curve[i].first - curve[i - 1].first);
  CHECK(std::abs(integral - 1.0) < 1e-3);
}

TEST_CASE("kde two-point weight vector evaluates the bimodal midpoint") {
  // alpha = (0, 1): rho(0.5) = (phi(0.5) + phi(-0.5)) / 2 = phi(0.5).
  const std::vector<double> alpha{0.0, 1.0};
  const auto curve = kde_weights(alpha, std::vector<double>{0.5});
  CHECK(curve[0].second == doctest::Approx(0.3520653267642995).epsilon(1e-12));
  CHECK(curve[0].second == doctest::Approx(0.3521).epsilon(1e-3));
}

TEST_CASE("eval report summarizes repetitions") {
  EvalReport report;
  report.model = "test";
  report.per_repetition = {0.5, 0.7, 0.9};
  report.per_repetition_mae = {2.0, 1.0, 3.0};
  report.finalize();
  CHECK(report.mean == doctest::Approx(0.7));
  CHECK(report.stddev == doctest::Approx(0.2));
  CHECK(report.mae_mean == doctest::Approx(2.0));
}
