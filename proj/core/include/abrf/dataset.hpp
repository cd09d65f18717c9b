#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace abrf {

enum class Task { kRegression, kClassification };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

// Error type for all user-facing failures (bad files, bad configs,
// dimension mismatches). Solvers and internal code use it too.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Immutable tabular dataset: n rows, m feature columns, one target.
// Classification targets are dense class ids in [0, C); the original
// label strings are kept in class_names in first-appearance order.
struct Dataset {
  Task task = Task::kRegression;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> features;           // row-major, n*m
  std::vector<double> targets;            // regression, length n
  std::vector<int> labels;                // classification, length n
  int num_classes = 0;                    // classification only
  std::vector<std::string> feature_names; // optional, length m when present
  std::vector<std::string> class_names;   // classification, length num_classes

  double feature(std::size_t row, std::size_t col) const {
    return features[row * m + col];
  }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * m, m};
  }

  // Checks the structural invariants; throws Error on violation.
  void validate() const;
};

// Loads a comma-separated file with a header row. target_column is either a
// column name or (if no header matches and it parses as an integer) a
// zero-based column index. All non-target cells must parse as reals.
Dataset load_csv(const std::string& path, const std::string& target_column, Task task);

// Writes a dataset back out as CSV (used by the `gen` subcommand).
void write_csv(const Dataset& ds, const std::string& path);

// Feature-only CSV (header + real-valued columns, no target), as consumed
// by `predict`.
struct FeatureTable {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> values;  // row-major
  std::vector<std::string> names;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * m, m}; }
};

FeatureTable load_features_csv(const std::string& path);

// Per-feature min-max transform to [0, 1]. Constant columns map to 0.
// Off by default everywhere; exposed for distance-sensitivity experiments.
// Fitted bounds persist with saved models so predictions see the same space.
struct MinMaxScaler {
  std::vector<double> lo;
  std::vector<double> hi;

  bool empty() const { return lo.empty(); }
  static MinMaxScaler fit(const Dataset& ds);
  std::vector<double> apply(std::span<const double> x) const;
  Dataset apply(const Dataset& ds) const;
};

Dataset minmax_scaled(const Dataset& ds);

// Row subset (rows may repeat); keeps task, class count and names.
Dataset subset(const Dataset& ds, std::span<const std::size_t> rows);

}  // namespace abrf
