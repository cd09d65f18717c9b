#pragma once

#include <span>
#include <string>
#include <vector>

#include "abrf/metrics.hpp"
#include "abrf/model.hpp"
#include "abrf/solver.hpp"

namespace abrf {

std::vector<double> default_eps_grid(Task task);  // k/9 regression, quarters classification
std::vector<double> default_tau_grid();

struct GridSearchOptions {
  SoftmaxSign sign = SoftmaxSign::kNegative;
  F1Average f1_avg = F1Average::kMacro;
  QpOptions qp;
  LpOptions lp;
  GradConfig grad;
};

struct GridCell {
  double epsilon = 0.0;
  double tau = 1.0;
  bool failed = false;
  std::string error;
  double metric = 0.0;  // validation R^2 or F1
  double mae = 0.0;     // regression only
  AttentionParams params;
};

struct GridSearchResult {
  std::vector<GridCell> cells;
  std::size_t best_index = 0;  // ties: smaller epsilon, then smaller tau

  const GridCell& best() const { return cells[best_index]; }
};

// Trains the model at every (epsilon, tau) pair on `train` and scores it on
// `val`; solver failures mark the cell failed instead of aborting the sweep.
// Models that ignore a grid dimension should receive a singleton for it.
GridSearchResult grid_search(const Forest& forest, const Dataset& train,
                             const Dataset& val, Model model,
                             std::span<const double> eps_grid,
                             std::span<const double> tau_grid,
                             const GridSearchOptions& options = {});

// Trains one model configuration on `train` (no validation side). When
// `trace` is given, the solver's objective-per-iteration curve lands there.
AttentionParams train_cell(const Forest& forest, const Dataset& train, Model model,
                           double epsilon, double tau, const GridSearchOptions& options,
                           std::vector<double>* trace = nullptr);

}  // namespace abrf
