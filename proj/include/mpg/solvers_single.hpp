#pragma once

#include <optional>
#include <vector>

#include "mpg/game.hpp"

namespace mpg {

// Player-1 winning region (sorted state indices) for the one-dimensional
// objective MP-sup >= 0 in dimension `dim` (0-based). Energy-lifting value
// iteration with per-state credit bounded by n*W.
std::vector<int> solve_single_mp_sup(const GameGraph& g, int dim);

// Exact maximum cycle mean in one dimension of a strongly connected graph
// view (Karp). Returns nullopt when the input has no cycle (single vertex
// without a self-loop). Throws GameError if not strongly connected.
std::optional<Rat> max_mean_cycle(const GameGraph& g, int dim);

}  // namespace mpg
