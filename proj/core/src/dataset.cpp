#include "abrf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace abrf {

std::string to_string(Task task) {
  return task == Task::kRegression ? "regression" : "classification";
}

Task task_from_string(const std::string& name) {
  if (name == "regression" || name == "reg") return Task::kRegression;
  if (name == "classification" || name == "cls") return Task::kClassification;
  throw Error("unknown task '" + name + "' (expected regression|classification)");
}

void Dataset::validate() const {
  if (n < 1) throw Error("dataset has no rows");
  if (m < 1) throw Error("dataset has no feature columns");
  if (features.size() != n * m) throw Error("feature matrix size mismatch");
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!std::isfinite(features[i]))
      throw Error("non-finite feature value at row " + std::to_string(i / m) +
                  ", column " + std::to_string(i % m));
  }
  if (task == Task::kRegression) {
    if (targets.size() != n) throw Error("target vector size mismatch");
    for (double y : targets)
      if (!std::isfinite(y)) throw Error("non-finite regression target");
  } else {
    if (labels.size() != n) throw Error("label vector size mismatch");
    if (num_classes < 2) throw Error("classification dataset needs at least 2 classes");
    for (int c : labels)
      if (c < 0 || c >= num_classes)
        throw Error("class id out of range [0, " + std::to_string(num_classes) + ")");
  }
  if (!feature_names.empty() && feature_names.size() != m)
    throw Error("feature_names length mismatch");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_real(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column, Task task) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw Error("empty file: " + path);
  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);
  if (header.empty()) throw Error("empty header row in " + path);

  // Resolve the target column: exact header name first, then numeric index.
  std::size_t target_idx = header.size();
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == trim(target_column)) target_idx = j;
  if (target_idx == header.size()) {
    try {
      const long idx = std::stol(trim(target_column));
      if (idx >= 0 && static_cast<std::size_t>(idx) < header.size())
        target_idx = static_cast<std::size_t>(idx);
    } catch (...) {
    }
  }
  if (target_idx == header.size())
    throw Error("target column '" + target_column + "' not found in " + path);
  if (header.size() < 2)
    throw Error("need at least one feature column besides the target in " + path);

  Dataset ds;
  ds.task = task;
  ds.m = header.size() - 1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != target_idx) ds.feature_names.push_back(header[j]);

  std::unordered_map<std::string, int> class_ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw Error(path + ": row " + std::to_string(line_no) + " has " +
                  std::to_string(cells.size()) + " cells, expected " +
                  std::to_string(header.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j == target_idx) continue;
      double value = 0.0;
      if (!parse_real(cells[j], value))
        throw Error(path + ": cannot parse cell '" + trim(cells[j]) + "' at row " +
                    std::to_string(line_no) + ", column '" + header[j] + "'");
      ds.features.push_back(value);
    }
    const std::string raw_target = trim(cells[target_idx]);
    if (task == Task::kRegression) {
      double y = 0.0;
      if (!parse_real(raw_target, y))
        throw Error(path + ": cannot parse target '" + raw_target + "' at row " +
                    std::to_string(line_no) + ", column '" + header[target_idx] + "'");
      ds.targets.push_back(y);
    } else {
      auto it = class_ids.find(raw_target);
      if (it == class_ids.end()) {
        it = class_ids.emplace(raw_target, static_cast<int>(ds.class_names.size())).first;
        ds.class_names.push_back(raw_target);
      }
      ds.labels.push_back(it->second);
    }
    ++ds.n;
  }
  if (ds.n == 0) throw Error("no data rows in " + path);
  if (task == Task::kClassification) {
    ds.num_classes = static_cast<int>(ds.class_names.size());
    if (ds.num_classes < 2)
      throw Error(path + ": classification target is constant (" +
                  std::to_string(ds.num_classes) + " distinct label)");
  }
  ds.validate();
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  for (std::size_t j = 0; j < ds.m; ++j) {
    out << (ds.feature_names.empty() ? "x" + std::to_string(j + 1) : ds.feature_names[j]);
    out << ',';
  }
  out << "target\n";
  char buf[40];
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (std::size_t j = 0; j < ds.m; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.feature(i, j));
      out << buf << ',';
    }
    if (ds.task == Task::kRegression) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.targets[i]);
      out << buf << '\n';
    } else {
      out << ds.class_names[static_cast<std::size_t>(ds.labels[i])] << '\n';
    }
  }
}

FeatureTable load_features_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty file: " + path);
  FeatureTable table;
  table.names = split_line(line);
  for (auto& h : table.names) h = trim(h);
  table.m = table.names.size();
  if (table.m == 0) throw Error("empty header row in " + path);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != table.m)
      throw Error(path + ": row " + std::to_string(line_no) + " has " +
                  std::to_string(cells.size()) + " cells, expected " +
                  std::to_string(table.m));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double value = 0.0;
      if (!parse_real(cells[j], value))
        throw Error(path + ": cannot parse cell '" + trim(cells[j]) + "' at row " +
                    std::to_string(line_no) + ", column '" + table.names[j] + "'");
      table.values.push_back(value);
    }
    ++table.n;
  }
  if (table.n == 0) throw Error("no data rows in " + path);
  return table;
}

MinMaxScaler MinMaxScaler::fit(const Dataset& ds) {
  MinMaxScaler scaler;
  scaler.lo.assign(ds.m, std::numeric_limits<double>::infinity());
  scaler.hi.assign(ds.m, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < ds.n; ++i)
    for (std::size_t j = 0; j < ds.m; ++j) {
      scaler.lo[j] = std::min(scaler.lo[j], ds.feature(i, j));
      scaler.hi[j] = std::max(scaler.hi[j], ds.feature(i, j));
    }
  return scaler;
}

std::vector<double> MinMaxScaler::apply(std::span<const double> x) const {
  if (x.size() != lo.size()) throw Error("minmax scaler: feature count mismatch");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double range = hi[j] - lo[j];
    out[j] = range > 0.0 ? (x[j] - lo[j]) / range : 0.0;
  }
  return out;
}

Dataset MinMaxScaler::apply(const Dataset& ds) const {
  Dataset out = ds;
  for (std::size_t i = 0; i < ds.n; ++i) {
    const std::vector<double> row = apply(ds.row(i));
    for (std::size_t j = 0; j < ds.m; ++j) out.features[i * ds.m + j] = row[j];
  }
  return out;
}

Dataset minmax_scaled(const Dataset& ds) { return MinMaxScaler::fit(ds).apply(ds); }

Dataset subset(const Dataset& ds, std::span<const std::size_t> rows) {
  Dataset out;
  out.task = ds.task;
  out.m = ds.m;
  out.n = rows.size();
  out.num_classes = ds.num_classes;
  out.feature_names = ds.feature_names;
  out.class_names = ds.class_names;
  out.features.reserve(rows.size() * ds.m);
  for (std::size_t i : rows) {
    if (i >= ds.n) throw Error("subset row index out of range");
    const auto r = ds.row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    if (ds.task == Task::kRegression)
      out.targets.push_back(ds.targets[i]);
    else
      out.labels.push_back(ds.labels[i]);
  }
  return out;
}

}  // namespace abrf
