#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abrf/dataset.hpp"

namespace abrf {

enum class Splitter { kCart, kErt };

std::string to_string(Splitter s);

// Tree growth regimes: a depth cap or a minimum leaf population.
struct GrowthCondition {
  enum class Kind { kMaxDepth, kMinLeaf };
  Kind kind = Kind::kMinLeaf;
  int value = 10;

  static GrowthCondition max_depth(int d);
  static GrowthCondition min_leaf(int q);
  // The two experiment regimes: depth limited to 2, and >= 10 per leaf.
  static GrowthCondition condition1() { return max_depth(2); }
  static GrowthCondition condition2() { return min_leaf(10); }
};

// Per-leaf statistics consumed by the attention mechanism: the members'
// mean feature vector (the key), their mean target (the value), and the
// class frequency distribution for classification trees.
struct LeafStats {
  std::vector<std::size_t> member_indices;  // dataset rows, bootstrap duplicates kept
  std::vector<double> mean_vector;          // length m
  double mean_target = 0.0;                 // regression
  std::vector<double> class_dist;           // length C, classification
};

struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // route left iff x[feature] <= threshold
  int left = -1;
  int right = -1;
  int leaf = -1;           // index into Tree::leaves when a leaf
};

struct Tree {
  Task mode = Task::kRegression;
  Splitter splitter = Splitter::kCart;
  std::size_t n_features = 0;
  int num_classes = 0;
  std::vector<TreeNode> nodes;   // nodes[0] is the root
  std::vector<LeafStats> leaves;

  int route_leaf(std::span<const double> x) const;
  const LeafStats& route(std::span<const double> x) const;

  int max_leaf_depth() const;
  std::size_t min_leaf_size() const;
};

// Grows one tree on the given sample rows (duplicates allowed; each sample
// position lands in exactly one leaf). CART picks the impurity-minimizing
// midpoint threshold over max_features randomly chosen features; ERT draws
// one uniform threshold per candidate feature and keeps the best.
// Equal-gain ties resolve to the lowest feature index, then lowest threshold.
Tree fit_tree(const Dataset& ds, std::span<const std::size_t> sample_indices,
              const GrowthCondition& condition, Splitter splitter,
              std::size_t max_features, std::uint64_t seed);

}  // namespace abrf
