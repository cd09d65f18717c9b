#include "abrf/generators.hpp"

#include <array>
#include <cmath>
#include <string>

#include "abrf/rng.hpp"

namespace abrf {

namespace {

constexpr double kPi = 3.14159265358979323846;

void name_features(Dataset& ds) {
  for (std::size_t j = 0; j < ds.m; ++j)
    ds.feature_names.push_back("x" + std::to_string(j + 1));
}

}  // namespace

Dataset gen_friedman(int variant, std::size_t n, double noise_sd, std::uint64_t seed) {
  if (variant < 1 || variant > 3) throw Error("friedman variant must be 1, 2 or 3");
  if (n < 1) throw Error("gen_friedman: n must be >= 1");
  if (noise_sd < 0) throw Error("gen_friedman: noise_sd must be >= 0");

  Dataset ds;
  ds.task = Task::kRegression;
  ds.n = n;
  ds.m = variant == 1 ? 10 : 4;
  ds.features.reserve(n * ds.m);
  ds.targets.reserve(n);
  Rng rng(seed);

  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, 10> x{};
    if (variant == 1) {
      for (std::size_t j = 0; j < 10; ++j) x[j] = rng.next_double();
    } else {
      x[0] = rng.uniform(0.0, 100.0);
      x[1] = rng.uniform(40.0 * kPi, 560.0 * kPi);
      x[2] = rng.next_double();
      x[3] = rng.uniform(1.0, 11.0);
    }
    double y = 0.0;
    switch (variant) {
      case 1:
        y = 10.0 * std::sin(kPi * x[0] * x[1]) + 20.0 * (x[2] - 0.5) * (x[2] - 0.5) +
            10.0 * x[3] + 5.0 * x[4];
        break;
      case 2: {
        const double t = x[1] * x[2] - 1.0 / (x[1] * x[3]);
        y = std::sqrt(x[0] * x[0] + t * t);
        break;
      }
      case 3: {
        const double t = x[1] * x[2] - 1.0 / (x[1] * x[3]);
        y = std::atan(t / x[0]);
        break;
      }
    }
    if (noise_sd > 0) y += rng.normal(0.0, noise_sd);
    for (std::size_t j = 0; j < ds.m; ++j) ds.features.push_back(x[j]);
    ds.targets.push_back(y);
  }
  name_features(ds);
  ds.validate();
  return ds;
}

Dataset gen_linear_regression(std::size_t n, std::size_t m, std::size_t n_informative,
                              double noise_sd, std::uint64_t seed) {
  if (n < 1 || m < 1) throw Error("gen_linear_regression: n and m must be >= 1");
  if (n_informative < 1 || n_informative > m)
    throw Error("gen_linear_regression: n_informative must be in [1, m]");
  if (noise_sd < 0) throw Error("gen_linear_regression: noise_sd must be >= 0");

  Dataset ds;
  ds.task = Task::kRegression;
  ds.n = n;
  ds.m = m;
  Rng rng(seed);

  // The first n_informative columns carry signal; coefficients 100 * U[0,1).
  std::vector<double> coef(n_informative);
  for (auto& c : coef) c = 100.0 * rng.next_double();

  ds.features.resize(n * m);
  ds.targets.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double y = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double value = rng.normal();
      ds.features[i * m + j] = value;
      if (j < n_informative) y += coef[j] * value;
    }
    if (noise_sd > 0) y += rng.normal(0.0, noise_sd);
    ds.targets[i] = y;
  }
  name_features(ds);
  ds.validate();
  return ds;
}

Dataset gen_sparse_uncorrelated(std::size_t n, std::size_t m, double noise_sd,
                                std::uint64_t seed) {
  if (n < 1) throw Error("gen_sparse_uncorrelated: n must be >= 1");
  if (m < 4) throw Error("gen_sparse_uncorrelated: m must be >= 4");
  if (noise_sd < 0) throw Error("gen_sparse_uncorrelated: noise_sd must be >= 0");

  Dataset ds;
  ds.task = Task::kRegression;
  ds.n = n;
  ds.m = m;
  ds.features.resize(n * m);
  ds.targets.resize(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) ds.features[i * m + j] = rng.normal();
    const double* x = ds.features.data() + i * m;
    double y = x[0] + 2.0 * x[1] - 2.0 * x[2] - 1.5 * x[3];
    if (noise_sd > 0) y += rng.normal(0.0, noise_sd);
    ds.targets[i] = y;
  }
  name_features(ds);
  ds.validate();
  return ds;
}

namespace {

// Cell values: 0 = blank, 1 = x, 2 = o.
constexpr int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                              {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};

bool has_line(const std::array<int, 9>& board, int player) {
  for (const auto& line : kLines)
    if (board[line[0]] == player && board[line[1]] == player && board[line[2]] == player)
      return true;
  return false;
}

// A winning board is a legal end state only if the winner's last move
// completed the line(s): some winner cell, when removed, destroys them all.
bool win_completable_by_last_move(std::array<int, 9> board, int player) {
  for (int c = 0; c < 9; ++c) {
    if (board[c] != player) continue;
    board[c] = 0;
    const bool still_winning = has_line(board, player);
    board[c] = player;
    if (!still_winning) return true;
  }
  return false;
}

bool is_final_board(const std::array<int, 9>& board) {
  int nx = 0, no = 0;
  for (int v : board) {
    if (v == 1) ++nx;
    if (v == 2) ++no;
  }
  if (nx != no && nx != no + 1) return false;
  const bool wx = has_line(board, 1);
  const bool wo = has_line(board, 2);
  if (wx && wo) return false;
  if (wx) return nx == no + 1 && win_completable_by_last_move(board, 1);
  if (wo) return nx == no && win_completable_by_last_move(board, 2);
  return nx + no == 9;
}

}  // namespace

Dataset gen_tictactoe_endgame() {
  Dataset ds;
  ds.task = Task::kClassification;
  ds.m = 27;
  static const char* kCells[9] = {"tl", "tm", "tr", "ml", "mm", "mr", "bl", "bm", "br"};
  static const char* kStates[3] = {"x", "o", "b"};
  for (const char* cell : kCells)
    for (const char* state : kStates)
      ds.feature_names.push_back(std::string(cell) + "_" + state);
  ds.class_names = {"positive", "negative"};
  ds.num_classes = 2;

  std::array<int, 9> board{};
  for (int code = 0; code < 19683; ++code) {
    int rest = code;
    for (int c = 8; c >= 0; --c) {
      board[c] = rest % 3;
      rest /= 3;
    }
    if (!is_final_board(board)) continue;
    for (int c = 0; c < 9; ++c) {
      ds.features.push_back(board[c] == 1 ? 1.0 : 0.0);
      ds.features.push_back(board[c] == 2 ? 1.0 : 0.0);
      ds.features.push_back(board[c] == 0 ? 1.0 : 0.0);
    }
    ds.labels.push_back(has_line(board, 1) ? 0 : 1);
    ++ds.n;
  }
  ds.validate();
  return ds;
}

}  // namespace abrf
