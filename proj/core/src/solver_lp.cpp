#include <algorithm>
#include <cmath>
#include <vector>

#include "abrf/solver.hpp"

namespace abrf {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

// Dense two-phase simplex over the tableau rows. Starts with Dantzig
// pricing and switches to Bland's rule permanently once the objective
// stalls, which guarantees termination on degenerate instances.
class SimplexTableau {
 public:
  SimplexTableau(std::size_t n_rows, std::size_t n_cols)
      : n_rows_(n_rows), n_cols_(n_cols), a_(n_rows * n_cols, 0.0), b_(n_rows, 0.0),
        basis_(n_rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return a_[i * n_cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * n_cols_ + j]; }
  double& rhs(std::size_t i) { return b_[i]; }
  void set_basis(std::size_t row, std::size_t var) { basis_[row] = var; }

  // Minimizes cost^T x from the current basis. `enterable(j)` filters
  // columns. Returns false when the pivot budget is exhausted.
  bool minimize(const std::vector<double>& cost, std::size_t max_pivots,
                std::size_t& pivots_used, const std::vector<bool>& enterable,
                std::vector<double>* trace = nullptr) {
    // Reduced-cost row: z_j - c_j = c_B^T B^-1 A_j - c_j.
    std::vector<double> zc(n_cols_, 0.0);
    for (std::size_t j = 0; j < n_cols_; ++j) {
      double z = 0.0;
      for (std::size_t i = 0; i < n_rows_; ++i) z += cost[basis_[i]] * at(i, j);
      zc[j] = z - cost[j];
    }
    double value = objective(cost);
    if (trace != nullptr) trace->push_back(value);
    std::size_t stalled = 0;
    bool bland = false;

    while (true) {
      // Entering column: any with z_j - c_j > tol.
      std::size_t entering = n_cols_;
      if (bland) {
        for (std::size_t j = 0; j < n_cols_; ++j)
          if (enterable[j] && zc[j] > kCostTol) {
            entering = j;
            break;
          }
      } else {
        double best = kCostTol;
        for (std::size_t j = 0; j < n_cols_; ++j)
          if (enterable[j] && zc[j] > best) {
            best = zc[j];
            entering = j;
          }
      }
      if (entering == n_cols_) return true;  // optimal

      // Ratio test; Bland breaks ties on the smallest basis variable.
      std::size_t leaving = n_rows_;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < n_rows_; ++i) {
        const double aij = at(i, entering);
        if (aij <= kPivotTol) continue;
        const double ratio = b_[i] / aij;
        if (leaving == n_rows_ || ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 && bland &&
             basis_[i] < basis_[leaving])) {
          best_ratio = ratio;
          leaving = i;
        }
      }
      if (leaving == n_rows_)
        throw Error("solve_lp: unbounded direction encountered");

      if (pivots_used >= max_pivots) return false;
      ++pivots_used;
      pivot(leaving, entering, zc);

      const double new_value = objective(cost);
      if (trace != nullptr) trace->push_back(new_value);
      if (value - new_value <= 1e-12 * std::max(1.0, std::abs(value))) {
        if (++stalled >= 50) bland = true;
      } else {
        stalled = 0;
      }
      value = new_value;
    }
  }

  double objective(const std::vector<double>& cost) const {
    double v = 0.0;
    for (std::size_t i = 0; i < n_rows_; ++i) v += cost[basis_[i]] * b_[i];
    return v;
  }

  double basic_value(std::size_t var) const {
    for (std::size_t i = 0; i < n_rows_; ++i)
      if (basis_[i] == var) return b_[i];
    return 0.0;
  }

  bool basis_contains(std::size_t var_begin, std::size_t var_end) const {
    for (std::size_t i = 0; i < n_rows_; ++i)
      if (basis_[i] >= var_begin && basis_[i] < var_end) return true;
    return false;
  }

  // Pivots basic artificials (at zero level) out of the basis when a
  // structural column is available; redundant rows keep their artificial.
  void expel_artificials(std::size_t art_begin, std::vector<double>& zc) {
    for (std::size_t i = 0; i < n_rows_; ++i) {
      if (basis_[i] < art_begin) continue;
      for (std::size_t j = 0; j < art_begin; ++j) {
        if (std::abs(at(i, j)) > kPivotTol) {
          pivot(i, j, zc);
          break;
        }
      }
    }
  }

  void pivot(std::size_t p, std::size_t q, std::vector<double>& zc) {
    const double pivot_value = at(p, q);
    for (std::size_t j = 0; j < n_cols_; ++j) at(p, j) /= pivot_value;
    b_[p] /= pivot_value;
    for (std::size_t i = 0; i < n_rows_; ++i) {
      if (i == p) continue;
      const double factor = at(i, q);
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < n_cols_; ++j) at(i, j) -= factor * at(p, j);
      at(i, q) = 0.0;
      b_[i] -= factor * b_[p];
    }
    const double zfactor = zc[q];
    if (zfactor != 0.0) {
      for (std::size_t j = 0; j < n_cols_; ++j) zc[j] -= zfactor * at(p, j);
      zc[q] = 0.0;
    }
    basis_[p] = q;
  }

 private:
  std::size_t n_rows_, n_cols_;
  std::vector<double> a_, b_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const LpInstance& inst, const LpOptions& options) {
  const std::size_t T = inst.n_trees;
  const std::size_t n = inst.n;
  if (T < 1 || n < 1) throw Error("solve_lp: empty instance");
  if (inst.V.size() != n * T || inst.Q.size() != n)
    throw Error("solve_lp: inconsistent dimensions");
  for (double v : inst.V)
    if (!std::isfinite(v)) throw Error("solve_lp: non-finite V entry");
  for (double v : inst.Q)
    if (!std::isfinite(v)) throw Error("solve_lp: non-finite Q entry");
  if (!(inst.epsilon >= 0.0 && inst.epsilon <= 1.0))
    throw Error("solve_lp: epsilon must be in [0, 1]");

  LpResult result;
  if (inst.epsilon == 0.0) {
    result.w = uniform_simplex(T);
    double obj = 0.0;
    for (double q : inst.Q) obj += std::abs(q);
    result.objective = obj;
    return result;
  }

  // Structural variables: w (T), then G (n). Rows: the simplex-sum equality
  // followed by the two absolute-value bounds per sample.
  const std::size_t n_struct = T + n;
  const std::size_t n_rows = 2 * n + 1;
  const std::size_t slack_begin = n_struct;
  const std::size_t art_begin = n_struct + 2 * n;

  struct RawRow {
    std::vector<double> coef;  // structural coefficients
    double rhs;
    bool equality;
  };
  std::vector<RawRow> raw(n_rows);
  raw[0].coef.assign(n_struct, 0.0);
  for (std::size_t k = 0; k < T; ++k) raw[0].coef[k] = 1.0;
  raw[0].rhs = 1.0;
  raw[0].equality = true;
  for (std::size_t s = 0; s < n; ++s) {
    RawRow& lower = raw[1 + 2 * s];  // G_s >= Q_s - eps V_s.w
    RawRow& upper = raw[2 + 2 * s];  // G_s >= eps V_s.w - Q_s
    lower.coef.assign(n_struct, 0.0);
    upper.coef.assign(n_struct, 0.0);
    for (std::size_t k = 0; k < T; ++k) {
      const double coef = inst.epsilon * inst.V[s * T + k];
      lower.coef[k] = -coef;
      upper.coef[k] = coef;
    }
    lower.coef[T + s] = -1.0;
    upper.coef[T + s] = -1.0;
    lower.rhs = -inst.Q[s];
    upper.rhs = inst.Q[s];
    lower.equality = false;
    upper.equality = false;
  }

  // Count artificials: equality rows and flipped (negative-rhs) rows need one.
  std::size_t n_art = 0;
  for (const RawRow& row : raw)
    if (row.equality || row.rhs < 0.0) ++n_art;

  const std::size_t n_cols = art_begin + n_art;
  SimplexTableau tab(n_rows, n_cols);
  std::vector<double> phase1_cost(n_cols, 0.0), phase2_cost(n_cols, 0.0);
  for (std::size_t j = art_begin; j < n_cols; ++j) phase1_cost[j] = 1.0;
  for (std::size_t s = 0; s < n; ++s) phase2_cost[T + s] = 1.0;

  std::size_t next_art = art_begin;
  for (std::size_t i = 0; i < n_rows; ++i) {
    RawRow row = raw[i];
    double sign = 1.0;
    if (row.rhs < 0.0) sign = -1.0;
    for (std::size_t j = 0; j < n_struct; ++j) tab.at(i, j) = sign * row.coef[j];
    tab.rhs(i) = sign * row.rhs;
    if (row.equality) {
      tab.at(i, next_art) = 1.0;
      tab.set_basis(i, next_art++);
    } else {
      const std::size_t slack = slack_begin + (i - 1);
      tab.at(i, slack) = sign;   // flipped rows get a surplus column
      if (sign > 0.0) {
        tab.set_basis(i, slack);
      } else {
        tab.at(i, next_art) = 1.0;
        tab.set_basis(i, next_art++);
      }
    }
  }

  std::vector<bool> enter_phase1(n_cols, true);
  std::vector<bool> enter_phase2(n_cols, true);
  for (std::size_t j = art_begin; j < n_cols; ++j) enter_phase2[j] = false;

  result.pivots = 0;
  if (n_art > 0) {
    if (!tab.minimize(phase1_cost, options.max_pivots, result.pivots, enter_phase1))
      throw Error("solve_lp: pivot budget exhausted in phase 1 (" +
                  std::to_string(result.pivots) + " pivots)");
    if (tab.objective(phase1_cost) > 1e-7)
      throw Error("solve_lp: phase 1 failed to reach feasibility");
    if (tab.basis_contains(art_begin, n_cols)) {
      std::vector<double> dummy(n_cols, 0.0);
      tab.expel_artificials(art_begin, dummy);
    }
  }
  if (!tab.minimize(phase2_cost, options.max_pivots, result.pivots, enter_phase2,
                    options.record_trace ? &result.trace : nullptr))
    throw Error("solve_lp: pivot budget exhausted in phase 2 (" +
                std::to_string(result.pivots) + " pivots)");

  result.w.resize(T);
  for (std::size_t k = 0; k < T; ++k) result.w[k] = std::max(0.0, tab.basic_value(k));
  result.objective = tab.objective(phase2_cost);
  if (!std::isfinite(result.objective)) throw Error("solve_lp: non-finite objective");
  return result;
}

}  // namespace abrf
