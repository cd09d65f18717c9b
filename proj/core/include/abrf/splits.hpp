#pragma once

#include <cstdint>
#include <vector>

#include "abrf/dataset.hpp"

namespace abrf {

// Repeated random train/test partitions: every repetition draws a fresh
// train split (4/5 by default) at random.
struct SplitPlan {
  std::size_t repetitions = 100;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Each repetition re-seeds from the plan seed and the repetition index, so
// any prefix of the sequence is stable under changes to `repetitions`.
std::vector<Split> make_splits(std::size_t n, const SplitPlan& plan);
std::vector<Split> make_splits(const Dataset& ds, const SplitPlan& plan);

}  // namespace abrf
