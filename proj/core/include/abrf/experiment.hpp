#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abrf/grid_search.hpp"
#include "abrf/model_io.hpp"
#include "abrf/splits.hpp"

namespace abrf {

// Full configuration of one cross-validated comparison run. Every field is
// echoed into the report, so reports are self-describing and reruns with an
// identical config are byte-identical.
struct ExperimentConfig {
  std::string dataset_name = "dataset";
  Ensemble ensemble = Ensemble::kRf;
  GrowthCondition condition = GrowthCondition::condition2();
  Model model = Model::kAbrf1Qp;
  std::size_t n_trees = 100;
  std::size_t max_features = 0;           // 0: task default
  std::vector<double> eps_grid;           // empty: task default
  std::vector<double> tau_grid;           // empty: default grid
  std::size_t repetitions = 100;
  double train_fraction = 0.8;
  double inner_fraction = 0.2;            // inner validation share of the train fold
  std::uint64_t seed = 0;
  bool minmax = false;
  bool with_surface = true;               // also score every cell on the test side
  std::size_t threads = 1;
  SoftmaxSign sign = SoftmaxSign::kNegative;
  F1Average f1_avg = F1Average::kMacro;
  QpOptions qp;
  LpOptions lp;
  GradConfig grad;
};

struct RepetitionRow {
  std::size_t repetition = 0;
  double baseline_metric = 0.0;
  double baseline_mae = 0.0;
  double model_metric = 0.0;
  double model_mae = 0.0;
  double eps_sel = 0.0;
  double tau_sel = 0.0;
};

struct SurfaceCell {
  double epsilon = 0.0;
  double tau = 0.0;
  double mean_metric = 0.0;
  double mean_mae = 0.0;
  std::size_t failed_repetitions = 0;
};

struct RunReport {
  ExperimentConfig config;
  std::string task;
  std::size_t n = 0, m = 0;
  std::vector<double> eps_grid, tau_grid;  // the effective grids
  std::vector<RepetitionRow> repetitions;
  EvalReport baseline;
  EvalReport model;
  std::vector<SurfaceCell> surface;        // test-side grid surface
  // Grid point maximizing the mean test metric, reported alongside the
  // inner-validation selection so both conventions are visible.
  double eps_opt_test = 0.0;
  double tau_opt_test = 0.0;
  double metric_at_test_opt = 0.0;
  bool has_surface = false;
};

// Runs the cross-validation protocol: per repetition fit the forest on the
// train fold, select (epsilon, tau) on an inner 80/20 split of that fold,
// refit the weights on the whole fold, and score the test fold.
RunReport run_experiment(const Dataset& ds, const ExperimentConfig& config);

Json report_to_json(const RunReport& report);
void write_report_json(const RunReport& report, const std::string& path);
void write_summary_csv(const RunReport& report, const std::string& path);
void write_repetitions_csv(const RunReport& report, const std::string& path);
void write_surface_csv(const RunReport& report, const std::string& path);

// Fits a single model on the full dataset (fixed epsilon/tau) for `fit`.
// `trace` receives the solver's objective curve when given.
SavedModel fit_model(const Dataset& ds, const ExperimentConfig& config, double epsilon,
                     double tau, std::vector<double>* trace = nullptr);

}  // namespace abrf
