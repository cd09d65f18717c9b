#include "abrf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <numeric>

#include "abrf/rng.hpp"

namespace abrf {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string condition_label(const GrowthCondition& c) {
  return (c.kind == GrowthCondition::Kind::kMaxDepth ? "max_depth=" : "min_leaf=") +
         std::to_string(c.value);
}

void validate_config(const Dataset& ds, const ExperimentConfig& cfg) {
  if (cfg.n_trees < 1) throw Error("config: n_trees must be >= 1");
  if (cfg.repetitions < 1) throw Error("config: repetitions must be >= 1");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
    throw Error("config: train_fraction must be in (0, 1)");
  if (!(cfg.inner_fraction > 0.0 && cfg.inner_fraction < 1.0))
    throw Error("config: inner_fraction must be in (0, 1)");
  if (cfg.model == Model::kAbrf1Lp && ds.task == Task::kClassification)
    throw Error("config: abrf1-lp supports regression only");
  for (double e : cfg.eps_grid)
    if (!(e >= 0.0 && e <= 1.0)) throw Error("config: eps grid value outside [0, 1]");
  for (double t : cfg.tau_grid)
    if (!(t > 0.0)) throw Error("config: tau grid value must be > 0");
}

struct RepetitionOutcome {
  RepetitionRow row;
  std::vector<GridCell> surface;  // test-side cells, grid order
};

struct Evaluation {
  double metric = 0.0;
  double mae_value = kNan;
};

Evaluation evaluate_on_panels(const Forest& forest, Model model,
                              const AttentionParams& params, const Dataset& test,
                              std::span<const InstancePanel> panels, F1Average f1_avg) {
  Evaluation out;
  if (test.task == Task::kRegression) {
    std::vector<double> pred(test.n);
    for (std::size_t i = 0; i < test.n; ++i) {
      if (model_is_gradient_trained(model))
        pred[i] = predict_with_model(forest, model, params, test.row(i)).value;
      else
        pred[i] = predict_regression(model_weights(model, panels[i], params),
                                     panels[i].values);
    }
    out.metric = r2(test.targets, pred);
    out.mae_value = mae(test.targets, pred);
  } else {
    std::vector<int> pred(test.n);
    const auto C = static_cast<std::size_t>(test.num_classes);
    for (std::size_t i = 0; i < test.n; ++i) {
      if (model_is_gradient_trained(model))
        pred[i] = predict_with_model(forest, model, params, test.row(i)).label;
      else
        pred[i] = predict_classification(model_weights(model, panels[i], params),
                                         panels[i].class_dists, C)
                      .second;
    }
    out.metric = f1(test.labels, pred, test.num_classes, f1_avg);
  }
  return out;
}

// Most frequent grid value across repetitions; ties go to the smaller one.
double mode_value(const std::vector<double>& values) {
  std::map<double, std::size_t> counts;
  for (double v : values) ++counts[v];
  double best = values.empty() ? 0.0 : values.front();
  std::size_t best_count = 0;
  for (const auto& [value, count] : counts) {
    if (count > best_count) {
      best = value;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

RunReport run_experiment(const Dataset& input, const ExperimentConfig& config) {
  input.validate();
  validate_config(input, config);
  const Dataset data = config.minmax ? minmax_scaled(input) : input;

  RunReport report;
  report.config = config;
  report.task = to_string(data.task);
  report.n = data.n;
  report.m = data.m;

  std::vector<double> eps_grid =
      config.eps_grid.empty() ? default_eps_grid(data.task) : config.eps_grid;
  std::vector<double> tau_grid =
      config.tau_grid.empty() ? default_tau_grid() : config.tau_grid;
  std::sort(eps_grid.begin(), eps_grid.end());
  std::sort(tau_grid.begin(), tau_grid.end());
  if (!model_uses_eps_grid(config.model)) eps_grid = {0.0};
  if (!model_uses_tau_grid(config.model)) tau_grid = {1.0};
  report.eps_grid = eps_grid;
  report.tau_grid = tau_grid;

  GridSearchOptions options;
  options.sign = config.sign;
  options.f1_avg = config.f1_avg;
  options.qp = config.qp;
  options.lp = config.lp;
  options.grad = config.grad;

  SplitPlan plan;
  plan.repetitions = config.repetitions;
  plan.train_fraction = config.train_fraction;
  plan.seed = derive_seed(config.seed, 0x5B1A5);
  const std::vector<Split> splits = make_splits(data, plan);

  const bool wants_model = config.model != Model::kBaseline;
  const bool multi_cell = eps_grid.size() * tau_grid.size() > 1;

  std::vector<RepetitionOutcome> outcomes(config.repetitions);

  auto run_repetition = [&](std::size_t rep) {
    const Split& split = splits[rep];
    const Dataset train_ds = subset(data, split.train);
    const Dataset test_ds = subset(data, split.test);

    ForestConfig fc;
    fc.n_trees = config.n_trees;
    fc.ensemble = config.ensemble;
    fc.condition = config.condition;
    fc.max_features = config.max_features;
    fc.seed = derive_seed(config.seed, 0xF0000 + rep);
    const Forest forest = fit_forest(train_ds, fc);

    RepetitionOutcome& outcome = outcomes[rep];
    outcome.row.repetition = rep;

    const std::vector<InstancePanel> test_panels = compute_panels(forest, test_ds);
    const AttentionParams no_params;
    const Evaluation base = evaluate_on_panels(forest, Model::kBaseline, no_params,
                                               test_ds, test_panels, config.f1_avg);
    outcome.row.baseline_metric = base.metric;
    outcome.row.baseline_mae = base.mae_value;
    if (!wants_model) {
      outcome.row.model_metric = kNan;
      outcome.row.model_mae = kNan;
      return;
    }

    // Nested selection: an inner split of the train fold picks (eps, tau).
    // The selection forest is refit on the inner-train part only, so the
    // validation rows never sit inside the leaf statistics they score.
    double eps_sel = eps_grid.front();
    double tau_sel = tau_grid.front();
    if (multi_cell) {
      std::vector<std::size_t> positions(train_ds.n);
      std::iota(positions.begin(), positions.end(), 0);
      Rng rng(derive_seed(config.seed, 0x1F0000 + rep));
      rng.shuffle(positions);
      auto n_val = static_cast<std::size_t>(
          std::llround(config.inner_fraction * static_cast<double>(train_ds.n)));
      n_val = std::min(std::max<std::size_t>(n_val, 1), train_ds.n - 1);
      std::vector<std::size_t> val_pos(positions.begin(),
                                       positions.begin() + static_cast<std::ptrdiff_t>(n_val));
      std::vector<std::size_t> fit_pos(positions.begin() + static_cast<std::ptrdiff_t>(n_val),
                                       positions.end());
      std::sort(val_pos.begin(), val_pos.end());
      std::sort(fit_pos.begin(), fit_pos.end());
      const Dataset inner_train = subset(train_ds, fit_pos);
      const Dataset inner_val = subset(train_ds, val_pos);
      ForestConfig inner_fc = fc;
      inner_fc.seed = derive_seed(config.seed, 0x2F0000 + rep);
      const Forest inner_forest = fit_forest(inner_train, inner_fc);
      const GridSearchResult selection = grid_search(inner_forest, inner_train, inner_val,
                                                     config.model, eps_grid, tau_grid,
                                                     options);
      eps_sel = selection.best().epsilon;
      tau_sel = selection.best().tau;
    }
    outcome.row.eps_sel = eps_sel;
    outcome.row.tau_sel = tau_sel;

    // Final weights come from the full train fold. With the surface enabled
    // the selected cell is reused; otherwise only that cell is trained.
    if (config.with_surface) {
      GridSearchResult surf = grid_search(forest, train_ds, test_ds, config.model,
                                          eps_grid, tau_grid, options);
      const GridCell* chosen = nullptr;
      for (const GridCell& cell : surf.cells)
        if (cell.epsilon == eps_sel && cell.tau == tau_sel) chosen = &cell;
      if (chosen != nullptr && !chosen->failed) {
        outcome.row.model_metric = chosen->metric;
        outcome.row.model_mae = data.task == Task::kRegression ? chosen->mae : kNan;
      } else {
        const AttentionParams params =
            train_cell(forest, train_ds, config.model, eps_sel, tau_sel, options);
        const Evaluation ev = evaluate_on_panels(forest, config.model, params, test_ds,
                                                 test_panels, config.f1_avg);
        outcome.row.model_metric = ev.metric;
        outcome.row.model_mae = ev.mae_value;
      }
      outcome.surface = std::move(surf.cells);
    } else {
      const AttentionParams params =
          train_cell(forest, train_ds, config.model, eps_sel, tau_sel, options);
      const Evaluation ev = evaluate_on_panels(forest, config.model, params, test_ds,
                                               test_panels, config.f1_avg);
      outcome.row.model_metric = ev.metric;
      outcome.row.model_mae = ev.mae_value;
    }
  };

  if (config.threads <= 1) {
    for (std::size_t rep = 0; rep < config.repetitions; ++rep) run_repetition(rep);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t rep = next.fetch_add(1);
        if (rep >= config.repetitions) break;
        run_repetition(rep);
      }
    };
    std::vector<std::future<void>> pool;
    const std::size_t n_workers = std::min(config.threads, config.repetitions);
    pool.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t)
      pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
  }

  report.baseline.model = "baseline";
  report.model.model = to_string(config.model);
  std::vector<double> eps_choices, tau_choices;
  for (const RepetitionOutcome& outcome : outcomes) {
    report.repetitions.push_back(outcome.row);
    report.baseline.per_repetition.push_back(outcome.row.baseline_metric);
    if (data.task == Task::kRegression)
      report.baseline.per_repetition_mae.push_back(outcome.row.baseline_mae);
    if (wants_model) {
      report.model.per_repetition.push_back(outcome.row.model_metric);
      if (data.task == Task::kRegression)
        report.model.per_repetition_mae.push_back(outcome.row.model_mae);
      eps_choices.push_back(outcome.row.eps_sel);
      tau_choices.push_back(outcome.row.tau_sel);
    }
  }
  report.baseline.finalize();
  if (wants_model) {
    report.model.finalize();
    report.model.eps_opt = mode_value(eps_choices);
    report.model.tau_opt = mode_value(tau_choices);
    report.model.has_grid = multi_cell;
  }

  // Aggregate the per-repetition test surfaces into mean cells.
  if (wants_model && config.with_surface) {
    report.has_surface = true;
    const std::size_t n_cells = eps_grid.size() * tau_grid.size();
    report.surface.assign(n_cells, SurfaceCell{});
    std::vector<std::size_t> ok(n_cells, 0);
    for (std::size_t i = 0; i < n_cells; ++i) {
      report.surface[i].epsilon = eps_grid[i / tau_grid.size()];
      report.surface[i].tau = tau_grid[i % tau_grid.size()];
    }
    for (const RepetitionOutcome& outcome : outcomes) {
      for (std::size_t i = 0; i < n_cells && i < outcome.surface.size(); ++i) {
        const GridCell& cell = outcome.surface[i];
        if (cell.failed) {
          ++report.surface[i].failed_repetitions;
          continue;
        }
        report.surface[i].mean_metric += cell.metric;
        report.surface[i].mean_mae += cell.mae;
        ++ok[i];
      }
    }
    bool found = false;
    for (std::size_t i = 0; i < n_cells; ++i) {
      if (ok[i] == 0) {
        report.surface[i].mean_metric = kNan;
        report.surface[i].mean_mae = kNan;
        continue;
      }
      report.surface[i].mean_metric /= static_cast<double>(ok[i]);
      report.surface[i].mean_mae /= static_cast<double>(ok[i]);
      if (!found || report.surface[i].mean_metric > report.metric_at_test_opt) {
        found = true;
        report.metric_at_test_opt = report.surface[i].mean_metric;
        report.eps_opt_test = report.surface[i].epsilon;
        report.tau_opt_test = report.surface[i].tau;
      }
    }
  }
  return report;
}

namespace {

Json eval_to_json(const EvalReport& ev, bool regression) {
  Json j;
  j["model"] = ev.model;
  j["mean"] = ev.mean;
  j["stddev"] = ev.stddev;
  if (regression) j["mae_mean"] = ev.mae_mean;
  j["per_repetition"] = ev.per_repetition;
  if (regression) j["per_repetition_mae"] = ev.per_repetition_mae;
  return j;
}

}  // namespace

Json report_to_json(const RunReport& report) {
  const bool regression = report.task == "regression";
  const ExperimentConfig& cfg = report.config;
  Json j;
  j["format"] = "abrf-run-report";
  j["version"] = 1;

  Json config;
  config["dataset"] = cfg.dataset_name;
  config["task"] = report.task;
  config["model"] = to_string(cfg.model);
  config["ensemble"] = to_string(cfg.ensemble);
  config["condition"] = condition_label(cfg.condition);
  config["n_trees"] = cfg.n_trees;
  config["max_features"] = cfg.max_features;
  config["repetitions"] = cfg.repetitions;
  config["train_fraction"] = cfg.train_fraction;
  config["inner_fraction"] = cfg.inner_fraction;
  config["seed"] = cfg.seed;
  config["minmax"] = cfg.minmax;
  config["with_surface"] = cfg.with_surface;
  config["softmax_sign"] = to_string(cfg.sign);
  config["f1_average"] = to_string(cfg.f1_avg);
  config["eps_grid"] = report.eps_grid;
  config["tau_grid"] = report.tau_grid;
  config["qp_tolerance"] = cfg.qp.tolerance;
  config["qp_max_iters"] = cfg.qp.max_iters;
  config["lp_max_pivots"] = cfg.lp.max_pivots;
  config["grad_learning_rate"] = cfg.grad.learning_rate;
  config["grad_max_iters"] = cfg.grad.max_iters;
  config["grad_tolerance"] = cfg.grad.tolerance;
  j["config"] = std::move(config);

  Json dataset;
  dataset["name"] = cfg.dataset_name;
  dataset["n"] = report.n;
  dataset["m"] = report.m;
  j["dataset"] = std::move(dataset);

  j["metric"] = regression ? "r2" : "f1";
  j["baseline"] = eval_to_json(report.baseline, regression);
  if (cfg.model != Model::kBaseline) {
    Json model = eval_to_json(report.model, regression);
    model["eps_opt"] = report.model.eps_opt;
    model["tau_opt"] = report.model.tau_opt;
    if (report.has_surface) {
      model["eps_opt_test"] = report.eps_opt_test;
      model["tau_opt_test"] = report.tau_opt_test;
      model["metric_at_test_opt"] = report.metric_at_test_opt;
    }
    Json eps_sel = Json::array(), tau_sel = Json::array();
    for (const RepetitionRow& row : report.repetitions) {
      eps_sel.push_back(row.eps_sel);
      tau_sel.push_back(row.tau_sel);
    }
    model["eps_selected"] = std::move(eps_sel);
    model["tau_selected"] = std::move(tau_sel);
    j["model"] = std::move(model);
  }
  if (report.has_surface) {
    Json surface = Json::array();
    for (const SurfaceCell& cell : report.surface) {
      Json c;
      c["epsilon"] = cell.epsilon;
      c["tau"] = cell.tau;
      c["mean_metric"] = cell.mean_metric;
      if (regression) c["mean_mae"] = cell.mean_mae;
      c["failed_repetitions"] = cell.failed_repetitions;
      surface.push_back(std::move(c));
    }
    j["surface"] = std::move(surface);
  }
  return j;
}

void write_report_json(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << report_to_json(report).dump(1) << '\n';
}

void write_summary_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  const bool regression = report.task == "regression";
  const ExperimentConfig& cfg = report.config;
  out << "dataset,model,task,ensemble,condition,n_trees,repetitions,metric,"
         "metric_mean,metric_std,mae_mean,eps_opt,tau_opt,eps_opt_test,tau_opt_test,"
         "metric_at_test_opt\n";
  auto line = [&](const EvalReport& ev, bool is_model) {
    out << cfg.dataset_name << ',' << ev.model << ',' << report.task << ','
        << to_string(cfg.ensemble) << ',' << condition_label(cfg.condition) << ','
        << cfg.n_trees << ',' << cfg.repetitions << ',' << (regression ? "r2" : "f1")
        << ',' << fmt(ev.mean) << ',' << fmt(ev.stddev) << ','
        << (regression ? fmt(ev.mae_mean) : std::string()) << ',';
    if (is_model) {
      out << fmt(ev.eps_opt) << ',' << fmt(ev.tau_opt) << ',';
      if (report.has_surface)
        out << fmt(report.eps_opt_test) << ',' << fmt(report.tau_opt_test) << ','
            << fmt(report.metric_at_test_opt);
      else
        out << ",,";
    } else {
      out << ",,,,";
    }
    out << '\n';
  };
  line(report.baseline, false);
  if (cfg.model != Model::kBaseline) line(report.model, true);
}

void write_repetitions_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << "repetition,baseline_metric,baseline_mae,model_metric,model_mae,eps_sel,tau_sel\n";
  for (const RepetitionRow& row : report.repetitions) {
    out << row.repetition << ',' << fmt(row.baseline_metric) << ','
        << fmt(row.baseline_mae) << ',' << fmt(row.model_metric) << ','
        << fmt(row.model_mae) << ',' << fmt(row.eps_sel) << ',' << fmt(row.tau_sel)
        << '\n';
  }
}

void write_surface_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  const bool regression = report.task == "regression";
  out << "kind,epsilon,tau,mean_metric,mean_mae,failed_repetitions\n";
  for (const SurfaceCell& cell : report.surface) {
    out << "cell," << fmt(cell.epsilon) << ',' << fmt(cell.tau) << ','
        << fmt(cell.mean_metric) << ',' << (regression ? fmt(cell.mean_mae) : std::string())
        << ',' << cell.failed_repetitions << '\n';
  }
  out << "baseline,,," << fmt(report.baseline.mean) << ','
      << (regression ? fmt(report.baseline.mae_mean) : std::string()) << ",0\n";
}

SavedModel fit_model(const Dataset& ds, const ExperimentConfig& config, double epsilon,
                     double tau, std::vector<double>* trace) {
  ds.validate();
  validate_config(ds, config);
  MinMaxScaler scaler;
  if (config.minmax) scaler = MinMaxScaler::fit(ds);
  const Dataset data = config.minmax ? scaler.apply(ds) : ds;
  ForestConfig fc;
  fc.n_trees = config.n_trees;
  fc.ensemble = config.ensemble;
  fc.condition = config.condition;
  fc.max_features = config.max_features;
  fc.seed = derive_seed(config.seed, 0xF17);
  SavedModel saved;
  saved.model = config.model;
  saved.forest = fit_forest(data, fc, config.threads);
  saved.feature_names = data.feature_names;
  saved.class_names = data.class_names;
  if (config.minmax) saved.scaler = scaler;
  GridSearchOptions options;
  options.sign = config.sign;
  options.f1_avg = config.f1_avg;
  options.qp = config.qp;
  options.lp = config.lp;
  options.grad = config.grad;
  saved.params = train_cell(saved.forest, data, config.model, epsilon, tau, options, trace);
  return saved;
}

}  // namespace abrf
