#pragma once

#include <span>
#include <string>
#include <vector>

#include "abrf/dataset.hpp"

namespace abrf {

// Coefficient of determination 1 - SSres/SStot. Requires >= 2 samples and a
// non-constant truth vector.
double r2(std::span<const double> y_true, std::span<const double> y_pred);

double mae(std::span<const double> y_true, std::span<const double> y_pred);

enum class F1Average { kMacro, kMicro, kWeighted };

F1Average f1_average_from_string(const std::string& name);
std::string to_string(F1Average avg);

// F-score over C classes; per-class F1 counts as 0 when precision + recall
// is 0. Macro averaging is the default everywhere.
double f1(std::span<const int> y_true, std::span<const int> y_pred, int n_classes,
          F1Average average = F1Average::kMacro);

// Gaussian kernel density of the weight distribution: unit-variance kernel
// centered at each alpha_k, averaged. Returns (t, rho(t)) pairs over grid.
std::vector<std::pair<double, double>> kde_weights(std::span<const double> alpha,
                                                   std::span<const double> grid);

void write_kde_csv(std::span<const std::pair<double, double>> curve,
                   const std::string& path);

// Cross-validation summary for one model.
struct EvalReport {
  std::string model;
  std::vector<double> per_repetition;  // primary metric (R^2 or F1) per repetition
  std::vector<double> per_repetition_mae;
  double mean = 0.0;
  double stddev = 0.0;   // sample standard deviation
  double mae_mean = 0.0;
  double eps_opt = 0.0;  // most frequent inner-validation choice
  double tau_opt = 0.0;
  bool has_grid = false;

  void finalize();  // fills mean/stddev/mae_mean from the vectors
};

}  // namespace abrf
