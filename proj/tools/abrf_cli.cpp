#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "abrf/experiment.hpp"
#include "abrf/generators.hpp"
#include "abrf/model_io.hpp"

namespace {

using abrf::Dataset;
using abrf::Error;
using abrf::Task;

struct DataFlags {
  std::string path;
  std::string target = "target";
  std::string task = "regression";
  std::string generator;
  std::size_t gen_n = 100;
  std::size_t gen_m = 10;
  double gen_noise = 1.0;
  std::size_t gen_informative = 10;
};

struct ModelFlags {
  std::string model = "abrf1-qp";
  std::string ensemble = "rf";
  int condition = 2;       // growth regime id (1: depth cap, 2: leaf floor)
  int max_depth = 0;       // explicit override
  int min_leaf = 0;        // explicit override
  std::size_t trees = 100;
  std::size_t max_features = 0;
  std::uint64_t seed = 0;
  bool minmax = false;
  std::size_t threads = 1;
  std::string sign = "negative";
  std::string f1_average = "macro";
  std::vector<double> eps_grid;
  std::vector<double> tau_grid;
  std::size_t reps = 100;
  double train_fraction = 0.8;
  double inner_fraction = 0.2;
  bool no_surface = false;
  bool force_surface = false;
  double qp_tol = 1e-9;
  std::size_t qp_iters = 50000;
  std::size_t lp_pivots = 50000;
  double lr = 0.1;
  std::size_t grad_iters = 5000;
  double grad_tol = 1e-8;
};

void add_data_flags(CLI::App* cmd, DataFlags& f, bool generator_allowed) {
  cmd->add_option("--data", f.path, "input CSV (header row, comma separated)");
  cmd->add_option("--target", f.target, "target column name or zero-based index");
  cmd->add_option("--task", f.task, "regression|classification");
  if (generator_allowed) {
    cmd->add_option("--generator", f.generator,
                    "synthetic source: friedman1|friedman2|friedman3|regression|sparse|ttte");
    cmd->add_option("--gen-n", f.gen_n, "generated sample count");
    cmd->add_option("--gen-m", f.gen_m, "generated feature count (regression|sparse)");
    cmd->add_option("--gen-noise", f.gen_noise, "generator noise standard deviation");
    cmd->add_option("--gen-informative", f.gen_informative,
                    "informative features (regression generator)");
  }
}

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool with_grid) {
  cmd->add_option("--model", f.model,
                  "baseline|softmax|abrf1-qp|abrf1-lp|abrf2|abrf3");
  cmd->add_option("--ensemble", f.ensemble, "rf|ert");
  cmd->add_option("--condition", f.condition, "tree growth regime: 1 (depth<=2) or 2 (leaf>=10)");
  cmd->add_option("--max-depth", f.max_depth, "explicit depth cap (overrides --condition)");
  cmd->add_option("--min-leaf", f.min_leaf, "explicit minimum leaf size (overrides --condition)");
  cmd->add_option("--trees", f.trees, "number of trees");
  cmd->add_option("--max-features", f.max_features,
                  "features per split (0: ceil(m/3) regression, ceil(sqrt(m)) classification)");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_flag("--minmax", f.minmax, "min-max scale features to [0,1]");
  cmd->add_option("--threads", f.threads, "worker threads for repetitions/trees");
  cmd->add_option("--softmax-sign", f.sign,
                  "negative|positive exponent in the distance softmax");
  cmd->add_option("--f1-average", f.f1_average, "macro|micro|weighted");
  cmd->add_option("--qp-tol", f.qp_tol, "projected-gradient stopping tolerance");
  cmd->add_option("--qp-iters", f.qp_iters, "projected-gradient iteration cap");
  cmd->add_option("--lp-pivots", f.lp_pivots, "simplex pivot cap");
  cmd->add_option("--lr", f.lr, "gradient trainer learning rate");
  cmd->add_option("--grad-iters", f.grad_iters, "gradient trainer iteration cap");
  cmd->add_option("--grad-tol", f.grad_tol, "gradient trainer loss tolerance");
  if (with_grid) {
    cmd->add_option("--eps-grid", f.eps_grid, "epsilon grid (default: task dependent)");
    cmd->add_option("--tau-grid", f.tau_grid, "tau grid (default: 0.01..100)");
    cmd->add_option("--reps", f.reps, "cross-validation repetitions");
    cmd->add_option("--train-fraction", f.train_fraction, "train share per repetition");
    cmd->add_option("--inner-fraction", f.inner_fraction,
                    "inner validation share of the train fold");
    cmd->add_flag("--no-surface", f.no_surface, "skip the test-side grid surface");
    cmd->add_flag("--surface", f.force_surface,
                  "force the test-side grid surface (default off for abrf2/abrf3)");
  }
}

Dataset load_input(const DataFlags& f, std::uint64_t seed) {
  if (!f.generator.empty()) {
    if (f.generator == "friedman1") return abrf::gen_friedman(1, f.gen_n, f.gen_noise, seed);
    if (f.generator == "friedman2") return abrf::gen_friedman(2, f.gen_n, f.gen_noise, seed);
    if (f.generator == "friedman3") return abrf::gen_friedman(3, f.gen_n, f.gen_noise, seed);
    if (f.generator == "regression")
      return abrf::gen_linear_regression(f.gen_n, f.gen_m, f.gen_informative, f.gen_noise,
                                         seed);
    if (f.generator == "sparse")
      return abrf::gen_sparse_uncorrelated(f.gen_n, f.gen_m, f.gen_noise, seed);
    if (f.generator == "ttte") return abrf::gen_tictactoe_endgame();
    throw Error("unknown generator '" + f.generator + "'");
  }
  if (f.path.empty()) throw Error("either --data or --generator is required");
  return abrf::load_csv(f.path, f.target, abrf::task_from_string(f.task));
}

std::string dataset_label(const DataFlags& f) {
  if (!f.generator.empty()) return f.generator;
  const std::size_t slash = f.path.find_last_of("/\\");
  return slash == std::string::npos ? f.path : f.path.substr(slash + 1);
}

abrf::ExperimentConfig build_config(const DataFlags& data, const ModelFlags& f) {
  abrf::ExperimentConfig cfg;
  cfg.dataset_name = dataset_label(data);
  cfg.model = abrf::model_from_string(f.model);
  cfg.ensemble = abrf::ensemble_from_string(f.ensemble);
  if (f.max_depth > 0)
    cfg.condition = abrf::GrowthCondition::max_depth(f.max_depth);
  else if (f.min_leaf > 0)
    cfg.condition = abrf::GrowthCondition::min_leaf(f.min_leaf);
  else if (f.condition == 1)
    cfg.condition = abrf::GrowthCondition::condition1();
  else if (f.condition == 2)
    cfg.condition = abrf::GrowthCondition::condition2();
  else
    throw Error("--condition must be 1 or 2 (or use --max-depth/--min-leaf)");
  cfg.n_trees = f.trees;
  cfg.max_features = f.max_features;
  cfg.eps_grid = f.eps_grid;
  cfg.tau_grid = f.tau_grid;
  cfg.repetitions = f.reps;
  cfg.train_fraction = f.train_fraction;
  cfg.inner_fraction = f.inner_fraction;
  cfg.seed = f.seed;
  cfg.minmax = f.minmax;
  cfg.threads = f.threads;
  cfg.sign = abrf::softmax_sign_from_string(f.sign);
  cfg.f1_avg = abrf::f1_average_from_string(f.f1_average);
  cfg.qp.tolerance = f.qp_tol;
  cfg.qp.max_iters = f.qp_iters;
  cfg.lp.max_pivots = f.lp_pivots;
  cfg.grad.learning_rate = f.lr;
  cfg.grad.max_iters = f.grad_iters;
  cfg.grad.tolerance = f.grad_tol;
  // The surface retrains every cell on the full fold; for the gradient
  // models that cost is steep, so it is opt-in there.
  const bool gradient = abrf::model_is_gradient_trained(cfg.model);
  cfg.with_surface = f.force_surface || (!gradient && !f.no_surface);
  return cfg;
}

int cmd_run(const DataFlags& data_flags, const ModelFlags& model_flags,
            const std::string& out_prefix) {
  const Dataset ds = load_input(data_flags, model_flags.seed);
  const abrf::ExperimentConfig cfg = build_config(data_flags, model_flags);
  const abrf::RunReport report = abrf::run_experiment(ds, cfg);
  abrf::write_report_json(report, out_prefix + ".json");
  abrf::write_summary_csv(report, out_prefix + "_summary.csv");
  abrf::write_repetitions_csv(report, out_prefix + "_repetitions.csv");
  if (report.has_surface) abrf::write_surface_csv(report, out_prefix + "_surface.csv");
  std::cout << "wrote " << out_prefix << ".json\n";
  return 0;
}

int cmd_grid(const DataFlags& data_flags, ModelFlags model_flags,
             const std::string& out_path) {
  model_flags.force_surface = true;
  const Dataset ds = load_input(data_flags, model_flags.seed);
  const abrf::ExperimentConfig cfg = build_config(data_flags, model_flags);
  const abrf::RunReport report = abrf::run_experiment(ds, cfg);
  abrf::write_surface_csv(report, out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_gen(const DataFlags& data_flags, std::uint64_t seed, const std::string& out_path) {
  if (data_flags.generator.empty()) throw Error("gen requires --generator");
  const Dataset ds = load_input(data_flags, seed);
  abrf::write_csv(ds, out_path);
  std::cout << "wrote " << out_path << " (" << ds.n << " rows, " << ds.m
            << " features)\n";
  return 0;
}

// KDE of the fitted attention weights for one instance (pass the dataset in
// the same feature space the model was fit on).
void write_kde_curve(const abrf::SavedModel& saved, const Dataset& ds,
                     std::size_t instance_row, const std::string& path) {
  if (instance_row >= ds.n)
    throw Error("--kde-instance " + std::to_string(instance_row) +
                " out of range (n=" + std::to_string(ds.n) + ")");
  const bool weighted =
      abrf::model_is_gradient_trained(saved.model) && !saved.params.z.empty();
  const abrf::InstancePanel pan =
      weighted ? abrf::panel(saved.forest, ds.row(instance_row), saved.params.z)
               : abrf::panel(saved.forest, ds.row(instance_row));
  const std::vector<double> alpha = abrf::model_weights(saved.model, pan, saved.params);
  std::vector<double> grid;
  for (double t = -4.5; t <= 5.5 + 1e-12; t += 0.01) grid.push_back(t);
  const auto curve = abrf::kde_weights(alpha, grid);
  abrf::write_kde_csv(curve, path);
}

int cmd_fit(const DataFlags& data_flags, const ModelFlags& model_flags, double epsilon,
            double tau, bool weights_only, const std::string& model_file,
            const std::string& out_path, const std::string& trace_path,
            const std::string& kde_path, std::size_t kde_instance) {
  const Dataset ds = load_input(data_flags, model_flags.seed);
  std::vector<double> trace;
  abrf::SavedModel saved;
  if (weights_only) {
    if (model_file.empty()) throw Error("--weights-only requires --model-file");
    saved = abrf::load_model(model_file);
    if (saved.forest.n_features != ds.m)
      throw Error("model expects " + std::to_string(saved.forest.n_features) +
                  " features, dataset has " + std::to_string(ds.m));
    if (saved.forest.mode != ds.task) throw Error("model/dataset task mismatch");
    const Dataset retrain_ds = saved.scaler.empty() ? ds : saved.scaler.apply(ds);
    saved.model = abrf::model_from_string(model_flags.model);
    abrf::GridSearchOptions options;
    options.sign = abrf::softmax_sign_from_string(model_flags.sign);
    options.f1_avg = abrf::f1_average_from_string(model_flags.f1_average);
    options.qp.tolerance = model_flags.qp_tol;
    options.qp.max_iters = model_flags.qp_iters;
    options.lp.max_pivots = model_flags.lp_pivots;
    options.grad.learning_rate = model_flags.lr;
    options.grad.max_iters = model_flags.grad_iters;
    options.grad.tolerance = model_flags.grad_tol;
    saved.params = abrf::train_cell(saved.forest, retrain_ds, saved.model, epsilon, tau,
                                    options, trace_path.empty() ? nullptr : &trace);
  } else {
    const abrf::ExperimentConfig cfg = build_config(data_flags, model_flags);
    saved = abrf::fit_model(ds, cfg, epsilon, tau,
                            trace_path.empty() ? nullptr : &trace);
  }
  abrf::save_model(saved, out_path.empty() ? model_file : out_path);
  std::cout << "wrote " << (out_path.empty() ? model_file : out_path) << "\n";
  if (!trace_path.empty()) {
    abrf::write_trace_csv(trace, trace_path);
    std::cout << "wrote " << trace_path << " (" << trace.size() << " iterations)\n";
  }
  if (!kde_path.empty()) {
    const Dataset kde_ds = saved.scaler.empty() ? ds : saved.scaler.apply(ds);
    write_kde_curve(saved, kde_ds, kde_instance, kde_path);
    std::cout << "wrote " << kde_path << "\n";
  }
  return 0;
}

int cmd_predict(const std::string& model_file, const std::string& data_path,
                const std::string& out_path) {
  const abrf::SavedModel saved = abrf::load_model(model_file);
  const abrf::FeatureTable table = abrf::load_features_csv(data_path);
  if (table.m != saved.forest.n_features)
    throw Error("model expects " + std::to_string(saved.forest.n_features) +
                " feature columns, input has " + std::to_string(table.m));
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write file: " + out_path);
  char buf[40];
  if (saved.forest.mode == Task::kRegression) {
    out << "prediction\n";
    for (std::size_t i = 0; i < table.n; ++i) {
      const abrf::Prediction p = saved.predict(table.row(i));
      std::snprintf(buf, sizeof(buf), "%.17g", p.value);
      out << buf << '\n';
    }
  } else {
    out << "label";
    for (const std::string& name : saved.class_names) out << ",prob_" << name;
    out << '\n';
    for (std::size_t i = 0; i < table.n; ++i) {
      const abrf::Prediction p = saved.predict(table.row(i));
      out << saved.class_names[static_cast<std::size_t>(p.label)];
      for (double prob : p.class_dist) {
        std::snprintf(buf, sizeof(buf), "%.17g", prob);
        out << ',' << buf;
      }
      out << '\n';
    }
  }
  std::cout << "wrote " << out_path << " (" << table.n << " predictions)\n";
  return 0;
}

void print_error_json(const std::string& message) {
  abrf::Json j;
  j["error"]["message"] = message;
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attention-based random forests: train, evaluate and reproduce"};
  app.set_config("--config");
  app.require_subcommand(1);

  DataFlags run_data, grid_data, gen_data, fit_data;
  ModelFlags run_model, grid_model, fit_model_flags;
  std::string run_out = "abrf_run", grid_out = "abrf_grid.csv", gen_out = "dataset.csv";
  std::uint64_t gen_seed = 0;
  double fit_epsilon = 0.5, fit_tau = 1.0;
  bool weights_only = false;
  std::string fit_model_file, fit_out = "model.json";
  std::string fit_trace, fit_kde;
  std::size_t fit_kde_instance = 0;
  std::string predict_model_file, predict_data, predict_out = "predictions.csv";

  CLI::App* run = app.add_subcommand("run", "cross-validated model comparison");
  add_data_flags(run, run_data, true);
  add_model_flags(run, run_model, true);
  run->add_option("--out", run_out, "output prefix (.json, _summary.csv, ...)");

  CLI::App* grid = app.add_subcommand("grid", "grid surface over (epsilon, tau)");
  add_data_flags(grid, grid_data, true);
  add_model_flags(grid, grid_model, true);
  grid->add_option("--out", grid_out, "output CSV path");

  CLI::App* gen = app.add_subcommand("gen", "write a synthetic dataset as CSV");
  add_data_flags(gen, gen_data, true);
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output CSV path");

  CLI::App* fit = app.add_subcommand("fit", "fit one model and save it as JSON");
  add_data_flags(fit, fit_data, true);
  add_model_flags(fit, fit_model_flags, false);
  fit->add_option("--epsilon", fit_epsilon, "contamination rate");
  fit->add_option("--tau", fit_tau, "softmax temperature");
  fit->add_flag("--weights-only", weights_only,
                "retrain weights against the forest in --model-file");
  fit->add_option("--model-file", fit_model_file, "existing model (with --weights-only)");
  fit->add_option("--out", fit_out, "output model path");
  fit->add_option("--trace", fit_trace, "write the solver objective trace as CSV");
  fit->add_option("--kde", fit_kde,
                  "write the Gaussian KDE of the fitted attention weights as CSV");
  fit->add_option("--kde-instance", fit_kde_instance,
                  "row whose attention weights feed --kde (default 0)");

  CLI::App* predict = app.add_subcommand("predict", "predict from a saved model");
  predict->add_option("--model-file", predict_model_file, "saved model JSON")->required();
  predict->add_option("--data", predict_data, "feature-only CSV")->required();
  predict->add_option("--out", predict_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) print_error_json(e.what());
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(run)) return cmd_run(run_data, run_model, run_out);
    if (app.got_subcommand(grid)) return cmd_grid(grid_data, grid_model, grid_out);
    if (app.got_subcommand(gen)) return cmd_gen(gen_data, gen_seed, gen_out);
    if (app.got_subcommand(fit))
      return cmd_fit(fit_data, fit_model_flags, fit_epsilon, fit_tau, weights_only,
                     fit_model_file, fit_out, fit_trace, fit_kde, fit_kde_instance);
    if (app.got_subcommand(predict))
      return cmd_predict(predict_model_file, predict_data, predict_out);
  } catch (const std::exception& e) {
    print_error_json(e.what());
    return 1;
  }
  return 0;
}
