#include "abrf/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <numeric>

#include "abrf/rng.hpp"

namespace abrf {

std::string to_string(Ensemble e) { return e == Ensemble::kRf ? "rf" : "ert"; }

Ensemble ensemble_from_string(const std::string& name) {
  if (name == "rf") return Ensemble::kRf;
  if (name == "ert") return Ensemble::kErt;
  throw Error("unknown ensemble '" + name + "' (expected rf|ert)");
}

std::size_t default_max_features(Task task, std::size_t m) {
  const double dm = static_cast<double>(m);
  const double k = task == Task::kRegression ? std::ceil(dm / 3.0) : std::ceil(std::sqrt(dm));
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

Forest fit_forest(const Dataset& ds, const ForestConfig& config, std::size_t threads) {
  ds.validate();
  if (config.n_trees < 1) throw Error("fit_forest: n_trees must be >= 1");
  const std::size_t max_features = config.max_features > 0
                                       ? config.max_features
                                       : default_max_features(ds.task, ds.m);
  if (max_features > ds.m) throw Error("fit_forest: max_features exceeds m");

  Forest forest;
  forest.config = config;
  forest.config.max_features = max_features;
  forest.mode = ds.task;
  forest.n_features = ds.m;
  forest.num_classes = ds.num_classes;
  forest.trees.resize(config.n_trees);

  // All seeds fixed before any tree is grown: scheduling cannot change them.
  std::vector<std::uint64_t> tree_seeds(config.n_trees), sample_seeds(config.n_trees);
  for (std::size_t k = 0; k < config.n_trees; ++k) {
    tree_seeds[k] = derive_seed(config.seed, 2 * k);
    sample_seeds[k] = derive_seed(config.seed, 2 * k + 1);
  }

  auto fit_one = [&](std::size_t k) {
    std::vector<std::size_t> sample;
    if (config.ensemble == Ensemble::kRf) {
      sample.resize(ds.n);
      Rng rng(sample_seeds[k]);
      for (auto& idx : sample) idx = static_cast<std::size_t>(rng.below(ds.n));
    } else {
      sample.resize(ds.n);
      std::iota(sample.begin(), sample.end(), 0);
    }
    const Splitter splitter =
        config.ensemble == Ensemble::kRf ? Splitter::kCart : Splitter::kErt;
    forest.trees[k] =
        fit_tree(ds, sample, config.condition, splitter, max_features, tree_seeds[k]);
  };

  if (threads <= 1 || config.n_trees == 1) {
    for (std::size_t k = 0; k < config.n_trees; ++k) fit_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= config.n_trees) break;
        fit_one(k);
      }
    };
    std::vector<std::future<void>> pool;
    for (std::size_t t = 0; t < std::min(threads, config.n_trees); ++t)
      pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
  }
  return forest;
}

InstancePanel panel(const Forest& forest, std::span<const double> x,
                    std::span<const double> z) {
  if (x.size() != forest.n_features)
    throw Error("panel: expected " + std::to_string(forest.n_features) +
                " features, got " + std::to_string(x.size()));
  if (!z.empty() && z.size() != forest.n_features)
    throw Error("panel: feature-weight vector has wrong length");

  const std::size_t T = forest.size();
  const std::size_t m = forest.n_features;
  InstancePanel p;
  p.n_trees = T;
  p.n_features = m;
  p.num_classes = forest.num_classes;
  p.distances.resize(T);
  p.mean_vectors.resize(T * m);
  if (forest.mode == Task::kRegression)
    p.values.resize(T);
  else
    p.class_dists.resize(T * static_cast<std::size_t>(forest.num_classes));

  for (std::size_t k = 0; k < T; ++k) {
    const LeafStats& leaf = forest.trees[k].route(x);
    double dist = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double a = leaf.mean_vector[j];
      p.mean_vectors[k * m + j] = a;
      const double diff = z.empty() ? x[j] - a : z[j] * (x[j] - a);
      dist += diff * diff;
    }
    p.distances[k] = dist;
    if (forest.mode == Task::kRegression) {
      p.values[k] = leaf.mean_target;
    } else {
      const auto C = static_cast<std::size_t>(forest.num_classes);
      for (std::size_t c = 0; c < C; ++c) p.class_dists[k * C + c] = leaf.class_dist[c];
    }
  }
  return p;
}

int argmax_label(std::span<const double> dist) {
  int best = 0;
  for (std::size_t c = 1; c < dist.size(); ++c)
    if (dist[c] > dist[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  return best;
}

Prediction predict_baseline(const Forest& forest, std::span<const double> x) {
  Prediction out;
  const auto T = static_cast<double>(forest.size());
  if (forest.mode == Task::kRegression) {
    double sum = 0.0;
    for (const Tree& tree : forest.trees) sum += tree.route(x).mean_target;
    out.value = sum / T;
  } else {
    const auto C = static_cast<std::size_t>(forest.num_classes);
    out.class_dist.assign(C, 0.0);
    for (const Tree& tree : forest.trees) {
      const LeafStats& leaf = tree.route(x);
      for (std::size_t c = 0; c < C; ++c) out.class_dist[c] += leaf.class_dist[c];
    }
    for (double& p : out.class_dist) p /= T;
    out.label = argmax_label(out.class_dist);
  }
  return out;
}

void verify_growth_condition(const Forest& forest) {
  const GrowthCondition& cond = forest.config.condition;
  for (std::size_t k = 0; k < forest.size(); ++k) {
    const Tree& tree = forest.trees[k];
    if (cond.kind == GrowthCondition::Kind::kMaxDepth) {
      if (tree.max_leaf_depth() > cond.value)
        throw Error("tree " + std::to_string(k) + " has leaf depth " +
                    std::to_string(tree.max_leaf_depth()) + " > " +
                    std::to_string(cond.value));
    } else {
      if (tree.min_leaf_size() < static_cast<std::size_t>(cond.value))
        throw Error("tree " + std::to_string(k) + " has a leaf of size " +
                    std::to_string(tree.min_leaf_size()) + " < " +
                    std::to_string(cond.value));
    }
  }
}

}  // namespace abrf
