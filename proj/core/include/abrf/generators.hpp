#pragma once

#include <cstdint>

#include "abrf/dataset.hpp"

namespace abrf {

// Friedman synthetic regression benchmarks (Breiman's definitions).
//   Friedman 1: x in [0,1]^10,
//     y = 10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5 + noise
//   Friedman 2/3: x1 in [0,100], x2 in [40pi, 560pi], x3 in [0,1], x4 in [1,11],
//     y2 = sqrt(x1^2 + (x2 x3 - 1/(x2 x4))^2) + noise
//     y3 = atan((x2 x3 - 1/(x2 x4)) / x1) + noise
// noise ~ Normal(0, noise_sd^2).
Dataset gen_friedman(int variant, std::size_t n, double noise_sd, std::uint64_t seed);

// Dense random linear model: standard-normal features, n_informative
// coefficients drawn as 100 * U[0,1), remaining coefficients zero.
Dataset gen_linear_regression(std::size_t n, std::size_t m, std::size_t n_informative,
                              double noise_sd, std::uint64_t seed);

// Sparse uncorrelated design: standard-normal features,
// y = x1 + 2 x2 - 2 x3 - 1.5 x4 + noise, noise ~ Normal(0, noise_sd^2).
Dataset gen_sparse_uncorrelated(std::size_t n, std::size_t m, double noise_sd,
                                std::uint64_t seed);

// Exhaustive tic-tac-toe endgame boards (x moves first, play stops at the
// first completed line). One row per reachable final board, 27 one-hot
// features (cell x / o / blank), class "positive" iff x holds a line.
// Deterministic: boards emitted in lexicographic order.
Dataset gen_tictactoe_endgame();

}  // namespace abrf
