#include "abrf/splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abrf/rng.hpp"

namespace abrf {

std::vector<Split> make_splits(std::size_t n, const SplitPlan& plan) {
  if (plan.repetitions < 1) throw Error("split plan needs at least one repetition");
  if (!(plan.train_fraction > 0.0 && plan.train_fraction < 1.0))
    throw Error("train_fraction must be in (0, 1)");
  const auto n_train = static_cast<std::size_t>(
      std::llround(plan.train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n)
    throw Error("train_fraction " + std::to_string(plan.train_fraction) +
                " leaves an empty train or test side for n=" + std::to_string(n));

  std::vector<Split> splits(plan.repetitions);
  for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(plan.seed, rep));
    rng.shuffle(order);
    Split& s = splits[rep];
    s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
  }
  return splits;
}

std::vector<Split> make_splits(const Dataset& ds, const SplitPlan& plan) {
  return make_splits(ds.n, plan);
}

}  // namespace abrf
