#include "abrf/grid_search.hpp"

#include <algorithm>
#include <cmath>

namespace abrf {

std::vector<double> default_eps_grid(Task task) {
  std::vector<double> grid;
  if (task == Task::kRegression) {
    for (int k = 0; k <= 9; ++k) grid.push_back(static_cast<double>(k) / 9.0);
  } else {
    grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  }
  return grid;
}

std::vector<double> default_tau_grid() { return {0.01, 0.1, 0.5, 1.0, 5.0, 10.0, 100.0}; }

namespace {

AttentionParams train_on_panels(const Forest& forest, const Dataset& train,
                                std::span<const InstancePanel> panels, Model model,
                                double epsilon, double tau,
                                const GridSearchOptions& options,
                                std::vector<double>* trace = nullptr) {
  AttentionParams params;
  params.epsilon = epsilon;
  params.tau = tau;
  params.sign = options.sign;
  switch (model) {
    case Model::kBaseline:
    case Model::kSoftmax:
      return params;
    case Model::kAbrf1Qp: {
      if (epsilon == 0.0) {
        params.w = uniform_simplex(forest.size());
        return params;
      }
      QpOptions qp_options = options.qp;
      qp_options.record_trace = qp_options.record_trace || trace != nullptr;
      QpResult qp;
      if (train.task == Task::kRegression) {
        qp = solve_qp(make_qp_instance(panels, train.targets, epsilon, tau, options.sign),
                      qp_options);
      } else {
        qp = solve_qp(make_qp_instance_classification(panels, train.labels,
                                                      train.num_classes, epsilon, tau,
                                                      options.sign),
                      qp_options);
      }
      params.w = std::move(qp.w);
      if (trace != nullptr) *trace = std::move(qp.trace);
      return params;
    }
    case Model::kAbrf1Lp: {
      if (train.task != Task::kRegression)
        throw Error("abrf1-lp supports regression only");
      if (epsilon == 0.0) {
        params.w = uniform_simplex(forest.size());
        return params;
      }
      LpOptions lp_options = options.lp;
      lp_options.record_trace = lp_options.record_trace || trace != nullptr;
      LpResult lp =
          solve_lp(make_lp_instance(panels, train.targets, epsilon, tau, options.sign),
                   lp_options);
      params.w = std::move(lp.w);
      if (trace != nullptr) *trace = std::move(lp.trace);
      return params;
    }
    case Model::kAbrf2:
    case Model::kAbrf3: {
      GradConfig grad = options.grad;
      grad.train_v = true;
      grad.train_z = true;
      grad.train_w = model == Model::kAbrf3;
      AttentionParams init;
      init.epsilon = model == Model::kAbrf2 ? 0.0 : epsilon;
      init.tau = tau;
      init.sign = options.sign;
      init.v = uniform_simplex(forest.size());
      init.z = uniform_simplex(forest.n_features);
      init.w = uniform_simplex(forest.size());
      TrainResult trained = train_gradient(forest, train, init, grad);
      if (trace != nullptr) *trace = std::move(trained.trace);
      return trained.params;
    }
  }
  throw Error("unreachable model case");
}

}  // namespace

AttentionParams train_cell(const Forest& forest, const Dataset& train, Model model,
                           double epsilon, double tau, const GridSearchOptions& options,
                           std::vector<double>* trace) {
  const std::vector<InstancePanel> panels =
      model_is_gradient_trained(model) ? std::vector<InstancePanel>{}
                                       : compute_panels(forest, train);
  return train_on_panels(forest, train, panels, model, epsilon, tau, options, trace);
}

GridSearchResult grid_search(const Forest& forest, const Dataset& train,
                             const Dataset& val, Model model,
                             std::span<const double> eps_grid,
                             std::span<const double> tau_grid,
                             const GridSearchOptions& options) {
  if (eps_grid.empty() || tau_grid.empty()) throw Error("grid_search: empty grid");
  for (double e : eps_grid)
    if (!(e >= 0.0 && e <= 1.0)) throw Error("grid_search: epsilon outside [0, 1]");
  for (double t : tau_grid)
    if (!(t > 0.0)) throw Error("grid_search: tau must be > 0");

  // Panels are shared across cells; gradient models rebuild their own view.
  std::vector<InstancePanel> train_panels, val_panels;
  if (!model_is_gradient_trained(model)) {
    train_panels = compute_panels(forest, train);
    val_panels = compute_panels(forest, val);
  }

  GridSearchResult result;
  bool any_success = false;
  double best_metric = 0.0;
  for (double epsilon : eps_grid) {
    for (double tau : tau_grid) {
      GridCell cell;
      cell.epsilon = epsilon;
      cell.tau = tau;
      try {
        cell.params =
            train_on_panels(forest, train, train_panels, model, epsilon, tau, options);
        if (val.task == Task::kRegression) {
          std::vector<double> pred(val.n);
          if (model_is_gradient_trained(model)) {
            for (std::size_t i = 0; i < val.n; ++i)
              pred[i] = predict_with_model(forest, model, cell.params, val.row(i)).value;
          } else {
            for (std::size_t i = 0; i < val.n; ++i) {
              const std::vector<double> alpha =
                  model_weights(model, val_panels[i], cell.params);
              pred[i] = predict_regression(alpha, val_panels[i].values);
            }
          }
          cell.metric = r2(val.targets, pred);
          cell.mae = mae(val.targets, pred);
        } else {
          std::vector<int> pred(val.n);
          const auto C = static_cast<std::size_t>(val.num_classes);
          if (model_is_gradient_trained(model)) {
            for (std::size_t i = 0; i < val.n; ++i)
              pred[i] = predict_with_model(forest, model, cell.params, val.row(i)).label;
          } else {
            for (std::size_t i = 0; i < val.n; ++i) {
              const std::vector<double> alpha =
                  model_weights(model, val_panels[i], cell.params);
              pred[i] =
                  predict_classification(alpha, val_panels[i].class_dists, C).second;
            }
          }
          cell.metric = f1(val.labels, pred, val.num_classes, options.f1_avg);
        }
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
      }
      if (!cell.failed && (!any_success || cell.metric > best_metric)) {
        any_success = true;
        best_metric = cell.metric;
        result.best_index = result.cells.size();
      }
      result.cells.push_back(std::move(cell));
    }
  }
  if (!any_success) throw Error("grid_search: every cell failed");
  return result;
}

}  // namespace abrf
