#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "mpg/game.hpp"

namespace mpg {

struct CnfFormula {
  int num_vars = 0;
  // Signed 1-based variable indices, exactly 3 per clause (repeats allowed).
  std::vector<std::array<int, 3>> clauses;
};

// k = 2n dimensions: dimension 2i-2 (0-based) is literal x_i, dimension
// 2i-1 is its complement. Player-1 initial state -> player-2 clause states
// -> literal states -> back; the literal-return edge carries +1 on its own
// component and -1 on its complement's, all other edges are zero.
GameGraph from_3sat(const CnfFormula& phi);

struct Digraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

// One-player k=2 game: added edge (x,y) with weight (n,-1) and (z,w) with
// weight (-1,n); original edges weight (-1,-1); initial state w. With
// unit_weights, the n-weight edges are expanded into chains of n unit edges.
GameGraph from_disjoint_paths(const Digraph& d, int w, int x, int y, int z,
                              bool unit_weights = false);

// "fig1", "fig3", or "barrier".
GameGraph fixture(std::string_view name);

GameGraph random_game(int states, int dim, int max_weight, double p2_fraction,
                      std::uint64_t seed);

bool brute_force_sat(const CnfFormula& phi);  // n <= 20
bool brute_force_disjoint_paths(const Digraph& d, int w, int x, int y, int z);

CnfFormula parse_dimacs(std::istream& in);
Digraph parse_digraph(std::istream& in);  // "n <count>" then "u v" lines

CnfFormula random_cnf(int max_vars, int max_clauses, std::uint64_t seed);
Digraph random_digraph(int max_vertices, int max_out_degree,
                       std::uint64_t seed);

}  // namespace mpg
