#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "abrf/generators.hpp"
#include "abrf/splits.hpp"

using namespace abrf;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/abrf_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_csv parses a small regression table") {
  const std::string path = write_temp("small.csv", "a,b,y\n1,2,5\n3,4,6\n5,6,7\n");
  const Dataset ds = load_csv(path, "y", Task::kRegression);
  CHECK(ds.n == 3);
  CHECK(ds.m == 2);
  CHECK(ds.targets == std::vector<double>{5, 6, 7});
  CHECK(ds.feature(1, 0) == 3);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("load_csv accepts a column index as target") {
  const std::string path = write_temp("byindex.csv", "a,b,c\n1,2,3\n4,5,6\n");
  const Dataset ds = load_csv(path, "1", Task::kRegression);
  CHECK(ds.m == 2);
  CHECK(ds.targets == std::vector<double>{2, 5});
}

TEST_CASE("load_csv reports the offending cell") {
  const std::string path = write_temp("bad.csv", "a,b,y\n1,2,5\n3,abc,6\n");
  CHECK_THROWS_WITH_AS(load_csv(path, "y", Task::kRegression),
                       doctest::Contains("row 3"), Error);
  try {
    load_csv(path, "y", Task::kRegression);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("'b'") != std::string::npos);
    CHECK(std::string(e.what()).find("abc") != std::string::npos);
  }
}

TEST_CASE("load_csv classification encodes labels in first-appearance order") {
  const std::string path =
      write_temp("cls.csv", "a,y\n1,cat\n2,dog\n3,cat\n4,bird\n");
  const Dataset ds = load_csv(path, "y", Task::kClassification);
  CHECK(ds.num_classes == 3);
  CHECK(ds.class_names == std::vector<std::string>{"cat", "dog", "bird"});
  CHECK(ds.labels == std::vector<int>{0, 1, 0, 2});
}

TEST_CASE("load_csv rejects a constant classification target") {
  const std::string path = write_temp("const.csv", "a,y\n1,same\n2,same\n");
  CHECK_THROWS_AS(load_csv(path, "y", Task::kClassification), Error);
}

TEST_CASE("load_csv rejects a missing file") {
  CHECK_THROWS_AS(load_csv("/tmp/abrf_does_not_exist.csv", "y", Task::kRegression), Error);
}

TEST_CASE("friedman-1 matches the closed form without noise") {
  const Dataset ds = gen_friedman(1, 200, 0.0, 42);
  CHECK(ds.m == 10);
  CHECK(ds.n == 200);
  for (std::size_t i = 0; i < ds.n; ++i) {
    const auto x = ds.row(i);
    const double expected = 10.0 * std::sin(3.14159265358979323846 * x[0] * x[1]) +
                            20.0 * (x[2] - 0.5) * (x[2] - 0.5) + 10.0 * x[3] + 5.0 * x[4];
    CHECK(ds.targets[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("friedman-1 value at the midpoint input") {
  // All coordinates 0.5: 10 sin(pi/4) + 0 + 5 + 2.5.
  const double y = 10.0 * std::sin(3.14159265358979323846 / 4.0) + 5.0 + 2.5;
  CHECK(y == doctest::Approx(14.5710678118654755).epsilon(1e-9));
}

TEST_CASE("friedman-2 and friedman-3 respect their input ranges") {
  for (int variant : {2, 3}) {
    const Dataset ds = gen_friedman(variant, 500, 0.0, 7);
    CHECK(ds.m == 4);
    for (std::size_t i = 0; i < ds.n; ++i) {
      const auto x = ds.row(i);
      CHECK(x[0] >= 0.0);
      CHECK(x[0] <= 100.0);
      CHECK(x[1] >= 40.0 * 3.141592653589793);
      CHECK(x[1] <= 560.0 * 3.141592653589793);
      CHECK(x[2] >= 0.0);
      CHECK(x[2] <= 1.0);
      CHECK(x[3] >= 1.0);
      CHECK(x[3] <= 11.0);
    }
  }
}

TEST_CASE("generators are deterministic in the seed") {
  const Dataset a = gen_friedman(2, 50, 1.5, 99);
  const Dataset b = gen_friedman(2, 50, 1.5, 99);
  CHECK(a.features == b.features);
  CHECK(a.targets == b.targets);
  const Dataset c = gen_friedman(2, 50, 1.5, 100);
  CHECK(a.features != c.features);
}

TEST_CASE("linear regression generator dimensions match the benchmark") {
  const Dataset ds = gen_linear_regression(100, 100, 10, 1.0, 3);
  CHECK(ds.n == 100);
  CHECK(ds.m == 100);
}

TEST_CASE("sparse uncorrelated follows its formula without noise") {
  const Dataset ds = gen_sparse_uncorrelated(100, 10, 0.0, 11);
  CHECK(ds.m == 10);
  for (std::size_t i = 0; i < ds.n; ++i) {
    const auto x = ds.row(i);
    const double expected = x[0] + 2.0 * x[1] - 2.0 * x[2] - 1.5 * x[3];
    CHECK(ds.targets[i] == doctest::Approx(expected).epsilon(1e-12));
  }
  // Hand case: x = (1,1,1,1,0,...) gives 1 + 2 - 2 - 1.5 = -0.5.
  CHECK(1.0 + 2.0 - 2.0 - 1.5 == doctest::Approx(-0.5));
}

TEST_CASE("tic-tac-toe endgame enumeration matches the known position counts") {
  const Dataset ds = gen_tictactoe_endgame();
  CHECK(ds.n == 958);
  CHECK(ds.m == 27);
  CHECK(ds.num_classes == 2);
  std::size_t positives = 0;
  for (int label : ds.labels)
    if (label == 0) ++positives;
  CHECK(positives == 626);  // x wins; 316 o wins + 16 draws make up the rest
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (std::size_t cell = 0; cell < 9; ++cell) {
      double sum = 0.0;
      for (std::size_t s = 0; s < 3; ++s) sum += ds.feature(i, cell * 3 + s);
      CHECK(sum == 1.0);  // one-hot per cell
    }
  }
}

TEST_CASE("make_splits partitions disjointly with the requested sizes") {
  const SplitPlan plan{.repetitions = 100, .train_fraction = 0.8, .seed = 5};
  const auto splits = make_splits(10, plan);
  CHECK(splits.size() == 100);
  for (const Split& s : splits) {
    CHECK(s.train.size() == 8);
    CHECK(s.test.size() == 2);
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == 10);
    CHECK(*all.rbegin() == 9);
  }
}

TEST_CASE("make_splits is deterministic and prefix-stable") {
  const SplitPlan plan{.repetitions = 5, .train_fraction = 0.75, .seed = 17};
  const auto a = make_splits(40, plan);
  const auto b = make_splits(40, plan);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].train == b[i].train);
    CHECK(a[i].test == b[i].test);
  }
  const SplitPlan longer{.repetitions = 9, .train_fraction = 0.75, .seed = 17};
  const auto c = make_splits(40, longer);
  CHECK(c[4].train == a[4].train);
}

TEST_CASE("make_splits rejects degenerate fractions") {
  CHECK_THROWS_AS(make_splits(3, SplitPlan{.repetitions = 1, .train_fraction = 0.99, .seed = 0}),
                  Error);
  CHECK_THROWS_AS(make_splits(10, SplitPlan{.repetitions = 0, .train_fraction = 0.8, .seed = 0}),
                  Error);
}

TEST_CASE("minmax scaling maps every feature into [0, 1]") {
  const Dataset ds = gen_friedman(2, 80, 0.0, 1);
  const Dataset scaled = minmax_scaled(ds);
  for (std::size_t j = 0; j < scaled.m; ++j) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < scaled.n; ++i) {
      lo = std::min(lo, scaled.feature(i, j));
      hi = std::max(hi, scaled.feature(i, j));
    }
    CHECK(lo == doctest::Approx(0.0));
    CHECK(hi == doctest::Approx(1.0));
  }
  CHECK(scaled.targets == ds.targets);
}

TEST_CASE("subset keeps class metadata and repeats rows") {
  const Dataset ds = gen_tictactoe_endgame();
  const std::vector<std::size_t> rows{0, 0, 5};
  const Dataset sub = subset(ds, rows);
  CHECK(sub.n == 3);
  CHECK(sub.num_classes == 2);
  CHECK(sub.labels[0] == sub.labels[1]);
  CHECK(sub.row(0)[0] == ds.row(0)[0]);
}
