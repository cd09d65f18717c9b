#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abrf/tree.hpp"

namespace abrf {

enum class Ensemble { kRf, kErt };

std::string to_string(Ensemble e);
Ensemble ensemble_from_string(const std::string& name);

struct ForestConfig {
  std::size_t n_trees = 100;
  Ensemble ensemble = Ensemble::kRf;
  GrowthCondition condition = GrowthCondition::condition2();
  std::size_t max_features = 0;  // 0: ceil(m/3) regression, ceil(sqrt(m)) classification
  std::uint64_t seed = 0;
};

struct Forest {
  ForestConfig config;
  Task mode = Task::kRegression;
  std::size_t n_features = 0;
  int num_classes = 0;
  std::vector<Tree> trees;

  std::size_t size() const { return trees.size(); }
};

// Per-instance view over the ensemble: for every tree the (possibly
// feature-weighted) squared L2 distance to the leaf mean vector, the leaf
// mean vector itself, and the leaf value (regression) or class distribution.
struct InstancePanel {
  std::size_t n_trees = 0;
  std::size_t n_features = 0;
  int num_classes = 0;
  std::vector<double> distances;     // T
  std::vector<double> mean_vectors;  // T*m, row k is A_k(x)
  std::vector<double> values;        // T, regression B_k(x)
  std::vector<double> class_dists;   // T*C, classification p_k(x)
};

std::size_t default_max_features(Task task, std::size_t m);

// RF fits each tree on a bootstrap resample of size n; ERT fits every tree
// on the full sample with random-threshold splitting. Per-tree seeds are
// derived up front from config.seed, so a thread pool may fit trees
// concurrently without affecting the result.
Forest fit_forest(const Dataset& ds, const ForestConfig& config, std::size_t threads = 1);

// Routes x through every tree. When z (a feature-weight simplex) is given,
// the distance is ||(x - A_k(x)) o z||^2, else the unweighted squared norm.
InstancePanel panel(const Forest& forest, std::span<const double> x,
                    std::span<const double> z = {});

struct Prediction {
  double value = 0.0;               // regression
  std::vector<double> class_dist;   // classification
  int label = -1;                   // argmax, lowest id wins ties
};

Prediction predict_baseline(const Forest& forest, std::span<const double> x);

// argmax with lowest-index tie-breaking (shared by all classifiers here).
int argmax_label(std::span<const double> dist);

// Throws unless every leaf of every tree satisfies the growth condition.
void verify_growth_condition(const Forest& forest);

}  // namespace abrf
