#include "abrf/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "abrf/rng.hpp"

namespace abrf {

std::string to_string(Splitter s) { return s == Splitter::kCart ? "cart" : "ert"; }

GrowthCondition GrowthCondition::max_depth(int d) {
  if (d < 1) throw Error("max_depth must be >= 1");
  return {Kind::kMaxDepth, d};
}

GrowthCondition GrowthCondition::min_leaf(int q) {
  if (q < 1) throw Error("min_leaf must be >= 1");
  return {Kind::kMinLeaf, q};
}

int Tree::route_leaf(std::span<const double> x) const {
  if (x.size() != n_features)
    throw Error("route: expected " + std::to_string(n_features) + " features, got " +
                std::to_string(x.size()));
  for (double v : x)
    if (std::isnan(v)) throw Error("route: NaN feature value");
  int node = 0;
  while (nodes[node].feature >= 0) {
    const TreeNode& nd = nodes[node];
    node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[node].leaf;
}

const LeafStats& Tree::route(std::span<const double> x) const {
  return leaves[static_cast<std::size_t>(route_leaf(x))];
}

int Tree::max_leaf_depth() const {
  int max_depth = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    if (nodes[node].feature < 0) {
      max_depth = std::max(max_depth, depth);
    } else {
      stack.emplace_back(nodes[node].left, depth + 1);
      stack.emplace_back(nodes[node].right, depth + 1);
    }
  }
  return max_depth;
}

std::size_t Tree::min_leaf_size() const {
  std::size_t smallest = std::numeric_limits<std::size_t>::max();
  for (const auto& leaf : leaves) smallest = std::min(smallest, leaf.member_indices.size());
  return smallest;
}

namespace {

struct Candidate {
  bool valid = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& ds, const GrowthCondition& condition, Splitter splitter,
              std::size_t max_features, std::uint64_t seed)
      : ds_(ds),
        condition_(condition),
        splitter_(splitter),
        max_features_(max_features),
        rng_(seed) {}

  Tree build(std::span<const std::size_t> sample) {
    Tree tree;
    tree.mode = ds_.task;
    tree.splitter = splitter_;
    tree.n_features = ds_.m;
    tree.num_classes = ds_.num_classes;
    tree_ = &tree;
    std::vector<std::size_t> members(sample.begin(), sample.end());
    grow(std::move(members), 0);
    return tree;
  }

 private:
  // Appends a node for `members` at `depth`; returns its index.
  int grow(std::vector<std::size_t> members, int depth) {
    const int node_index = static_cast<int>(tree_->nodes.size());
    tree_->nodes.emplace_back();

    Candidate best;
    if (may_split(members, depth) && !is_pure(members)) best = best_split(members);

    if (!best.valid) {
      tree_->nodes[node_index].leaf = static_cast<int>(tree_->leaves.size());
      tree_->leaves.push_back(make_leaf(members));
      return node_index;
    }

    std::vector<std::size_t> left, right;
    left.reserve(members.size());
    right.reserve(members.size());
    for (std::size_t idx : members) {
      if (ds_.feature(idx, static_cast<std::size_t>(best.feature)) <= best.threshold)
        left.push_back(idx);
      else
        right.push_back(idx);
    }
    members.clear();
    members.shrink_to_fit();

    const int left_index = grow(std::move(left), depth + 1);
    const int right_index = grow(std::move(right), depth + 1);
    TreeNode& node = tree_->nodes[node_index];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left_index;
    node.right = right_index;
    return node_index;
  }

  bool may_split(const std::vector<std::size_t>& members, int depth) const {
    if (members.size() < 2) return false;
    if (condition_.kind == GrowthCondition::Kind::kMaxDepth)
      return depth < condition_.value;
    return members.size() >= 2 * static_cast<std::size_t>(condition_.value);
  }

  bool is_pure(const std::vector<std::size_t>& members) const {
    if (ds_.task == Task::kRegression) {
      const double first = ds_.targets[members.front()];
      return std::all_of(members.begin(), members.end(),
                         [&](std::size_t i) { return ds_.targets[i] == first; });
    }
    const int first = ds_.labels[members.front()];
    return std::all_of(members.begin(), members.end(),
                       [&](std::size_t i) { return ds_.labels[i] == first; });
  }

  // Samples max_features distinct feature indices, returned in ascending
  // order so that candidate evaluation (and tie-breaking) is deterministic.
  std::vector<int> sample_features() {
    std::vector<int> all(ds_.m);
    std::iota(all.begin(), all.end(), 0);
    const std::size_t k = std::min(max_features_, ds_.m);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.below(ds_.m - i));
      std::swap(all[i], all[j]);
    }
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
  }

  Candidate best_split(const std::vector<std::size_t>& members) {
    const std::vector<int> features = sample_features();
    Candidate best;
    for (int f : features) {
      Candidate c = splitter_ == Splitter::kCart ? best_cart_split(members, f)
                                                 : ert_split(members, f);
      if (c.valid && c.impurity < best.impurity) best = c;
    }
    return best;
  }

  bool leaf_size_ok(std::size_t left, std::size_t right) const {
    if (condition_.kind != GrowthCondition::Kind::kMinLeaf) return left >= 1 && right >= 1;
    const auto q = static_cast<std::size_t>(condition_.value);
    return left >= q && right >= q;
  }

  Candidate best_cart_split(const std::vector<std::size_t>& members, int feature) {
    const std::size_t count = members.size();
    std::vector<std::pair<double, std::size_t>> ordered;
    ordered.reserve(count);
    for (std::size_t idx : members)
      ordered.emplace_back(ds_.feature(idx, static_cast<std::size_t>(feature)), idx);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    Candidate best;
    best.feature = feature;
    if (ds_.task == Task::kRegression) {
      double total_sum = 0.0, total_sq = 0.0;
      for (const auto& [v, idx] : ordered) {
        const double y = ds_.targets[idx];
        total_sum += y;
        total_sq += y * y;
      }
      double left_sum = 0.0, left_sq = 0.0;
      for (std::size_t i = 1; i < count; ++i) {
        const double y = ds_.targets[ordered[i - 1].second];
        left_sum += y;
        left_sq += y * y;
        if (ordered[i].first == ordered[i - 1].first) continue;
        if (!leaf_size_ok(i, count - i)) continue;
        const double right_sum = total_sum - left_sum;
        const double right_sq = total_sq - left_sq;
        const double sse_left = left_sq - left_sum * left_sum / static_cast<double>(i);
        const double sse_right =
            right_sq - right_sum * right_sum / static_cast<double>(count - i);
        const double impurity = sse_left + sse_right;
        if (impurity < best.impurity) {
          best.valid = true;
          best.impurity = impurity;
          best.threshold = safe_midpoint(ordered[i - 1].first, ordered[i].first);
        }
      }
    } else {
      const auto C = static_cast<std::size_t>(ds_.num_classes);
      std::vector<double> total(C, 0.0), left(C, 0.0);
      for (const auto& [v, idx] : ordered) total[static_cast<std::size_t>(ds_.labels[idx])] += 1.0;
      for (std::size_t i = 1; i < count; ++i) {
        left[static_cast<std::size_t>(ds_.labels[ordered[i - 1].second])] += 1.0;
        if (ordered[i].first == ordered[i - 1].first) continue;
        if (!leaf_size_ok(i, count - i)) continue;
        const auto n_left = static_cast<double>(i);
        const auto n_right = static_cast<double>(count - i);
        double sq_left = 0.0, sq_right = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
          sq_left += left[c] * left[c];
          const double r = total[c] - left[c];
          sq_right += r * r;
        }
        // Weighted Gini written as counts minus sum of squared counts over size.
        const double impurity = (n_left - sq_left / n_left) + (n_right - sq_right / n_right);
        if (impurity < best.impurity) {
          best.valid = true;
          best.impurity = impurity;
          best.threshold = safe_midpoint(ordered[i - 1].first, ordered[i].first);
        }
      }
    }
    return best;
  }

  // Midpoint of two adjacent distinct values; falls back to the lower value
  // if rounding would put the midpoint at or above the upper one.
  static double safe_midpoint(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2.0;
    return (mid >= hi || mid < lo) ? lo : mid;
  }

  Candidate ert_split(const std::vector<std::size_t>& members, int feature) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : members) {
      const double v = ds_.feature(idx, static_cast<std::size_t>(feature));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    Candidate c;
    if (lo >= hi) return c;
    const double threshold = rng_.uniform(lo, hi);

    std::size_t n_left = 0;
    if (ds_.task == Task::kRegression) {
      double left_sum = 0.0, left_sq = 0.0, right_sum = 0.0, right_sq = 0.0;
      for (std::size_t idx : members) {
        const double y = ds_.targets[idx];
        if (ds_.feature(idx, static_cast<std::size_t>(feature)) <= threshold) {
          ++n_left;
          left_sum += y;
          left_sq += y * y;
        } else {
          right_sum += y;
          right_sq += y * y;
        }
      }
      const std::size_t n_right = members.size() - n_left;
      if (!leaf_size_ok(n_left, n_right)) return c;
      c.impurity = (left_sq - left_sum * left_sum / static_cast<double>(n_left)) +
                   (right_sq - right_sum * right_sum / static_cast<double>(n_right));
    } else {
      const auto C = static_cast<std::size_t>(ds_.num_classes);
      std::vector<double> left(C, 0.0), right(C, 0.0);
      for (std::size_t idx : members) {
        const auto label = static_cast<std::size_t>(ds_.labels[idx]);
        if (ds_.feature(idx, static_cast<std::size_t>(feature)) <= threshold) {
          ++n_left;
          left[label] += 1.0;
        } else {
          right[label] += 1.0;
        }
      }
      const std::size_t n_right = members.size() - n_left;
      if (!leaf_size_ok(n_left, n_right)) return c;
      double sq_left = 0.0, sq_right = 0.0;
      for (std::size_t cls = 0; cls < C; ++cls) {
        sq_left += left[cls] * left[cls];
        sq_right += right[cls] * right[cls];
      }
      c.impurity = (static_cast<double>(n_left) - sq_left / static_cast<double>(n_left)) +
                   (static_cast<double>(n_right) - sq_right / static_cast<double>(n_right));
    }
    c.valid = true;
    c.feature = feature;
    c.threshold = threshold;
    return c;
  }

  LeafStats make_leaf(std::vector<std::size_t>& members) const {
    LeafStats leaf;
    leaf.member_indices = std::move(members);
    leaf.mean_vector.assign(ds_.m, 0.0);
    for (std::size_t idx : leaf.member_indices)
      for (std::size_t j = 0; j < ds_.m; ++j) leaf.mean_vector[j] += ds_.feature(idx, j);
    const auto size = static_cast<double>(leaf.member_indices.size());
    for (double& v : leaf.mean_vector) v /= size;
    if (ds_.task == Task::kRegression) {
      double sum = 0.0;
      for (std::size_t idx : leaf.member_indices) sum += ds_.targets[idx];
      leaf.mean_target = sum / size;
    } else {
      leaf.class_dist.assign(static_cast<std::size_t>(ds_.num_classes), 0.0);
      for (std::size_t idx : leaf.member_indices)
        leaf.class_dist[static_cast<std::size_t>(ds_.labels[idx])] += 1.0;
      for (double& p : leaf.class_dist) p /= size;
    }
    return leaf;
  }

  const Dataset& ds_;
  GrowthCondition condition_;
  Splitter splitter_;
  std::size_t max_features_;
  Rng rng_;
  Tree* tree_ = nullptr;
};

}  // namespace

Tree fit_tree(const Dataset& ds, std::span<const std::size_t> sample_indices,
              const GrowthCondition& condition, Splitter splitter,
              std::size_t max_features, std::uint64_t seed) {
  if (sample_indices.empty()) throw Error("fit_tree: empty sample");
  if (max_features < 1 || max_features > ds.m)
    throw Error("fit_tree: max_features must be in [1, m]");
  for (std::size_t idx : sample_indices)
    if (idx >= ds.n) throw Error("fit_tree: sample index out of range");
  TreeBuilder builder(ds, condition, splitter, max_features, seed);
  return builder.build(sample_indices);
}

}  // namespace abrf
