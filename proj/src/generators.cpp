#include "mpg/generators.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <istream>
#include <random>
#include <sstream>
#include <string>

namespace mpg {

namespace {

void validate_cnf(const CnfFormula& phi) {
  if (phi.num_vars < 1) throw GameError("formula needs at least one variable");
  for (const auto& cl : phi.clauses) {
    for (int lit : cl) {
      int v = std::abs(lit);
      if (lit == 0 || v > phi.num_vars) {
        throw GameError("literal out of range: " + std::to_string(lit));
      }
    }
  }
}

// 0-based weight component of a signed literal: 2(v-1) for x_v, 2(v-1)+1
// for its complement.
int literal_dim(int lit) { return 2 * (std::abs(lit) - 1) + (lit < 0 ? 1 : 0); }

std::string literal_name(int lit) {
  return (lit < 0 ? std::string("n") : std::string("p")) +
         std::to_string(std::abs(lit));
}

}  // namespace

GameGraph from_3sat(const CnfFormula& phi) {
  validate_cnf(phi);
  if (phi.clauses.empty()) throw GameError("formula needs at least one clause");
  const int k = 2 * phi.num_vars;
  std::vector<State> states;
  states.push_back({"init", Player::One});
  for (std::size_t j = 0; j < phi.clauses.size(); ++j) {
    states.push_back({"c" + std::to_string(j + 1), Player::Two});
  }
  // One literal state per distinct literal that occurs in the formula.
  std::vector<int> literals;
  for (const auto& cl : phi.clauses) {
    for (int lit : cl) literals.push_back(lit);
  }
  std::sort(literals.begin(), literals.end());
  literals.erase(std::unique(literals.begin(), literals.end()),
                 literals.end());
  std::vector<int> lit_state(2 * phi.num_vars, -1);
  for (int lit : literals) {
    lit_state[literal_dim(lit)] = static_cast<int>(states.size());
    states.push_back({literal_name(lit), Player::One});
  }

  std::vector<Edge> edges;
  WeightVector zero(k, 0);
  int eid = 0;
  auto add = [&](int src, int dst, WeightVector w) {
    edges.push_back({"e" + std::to_string(++eid), src, dst, std::move(w)});
  };
  for (std::size_t j = 0; j < phi.clauses.size(); ++j) {
    add(0, static_cast<int>(j) + 1, zero);
    for (int lit : phi.clauses[j]) {
      int ls = lit_state[literal_dim(lit)];
      bool dup = false;
      for (const Edge& e : edges) {
        if (e.src == static_cast<int>(j) + 1 && e.dst == ls) dup = true;
      }
      if (!dup) add(static_cast<int>(j) + 1, ls, zero);
    }
  }
  for (int lit : literals) {
    WeightVector w(k, 0);
    w[literal_dim(lit)] = 1;
    w[literal_dim(-lit)] = -1;
    add(lit_state[literal_dim(lit)], 0, std::move(w));
  }
  return GameGraph(k, std::move(states), std::move(edges), 0);
}

namespace {

void validate_digraph(const Digraph& d) {
  if (d.n < 1) throw GameError("digraph needs at least one vertex");
  for (auto [u, v] : d.edges) {
    if (u < 0 || u >= d.n || v < 0 || v >= d.n) {
      throw GameError("digraph edge endpoint out of range");
    }
  }
}

}  // namespace

GameGraph from_disjoint_paths(const Digraph& d, int w, int x, int y, int z,
                              bool unit_weights) {
  validate_digraph(d);
  for (int t : {w, x, y, z}) {
    if (t < 0 || t >= d.n) throw GameError("terminal vertex out of range");
  }
  if (w == x || w == y || w == z || x == y || x == z || y == z) {
    throw GameError("terminal vertices must be pairwise distinct");
  }
  const long long n = d.n;
  std::vector<State> states;
  for (int v = 0; v < d.n; ++v) {
    states.push_back({"v" + std::to_string(v), Player::One});
  }
  std::vector<Edge> edges;
  int eid = 0;
  auto add = [&](int src, int dst, long long a, long long b) {
    edges.push_back({"e" + std::to_string(++eid), src, dst, {a, b}});
  };
  for (auto [u, v] : d.edges) add(u, v, -1, -1);
  // The reward edges closing the two sought paths into one big cycle.
  auto add_reward = [&](int src, int dst, bool first_dim) {
    if (!unit_weights) {
      add(src, dst, first_dim ? n : -1, first_dim ? -1 : n);
      return;
    }
    // {-1,0,1} variant: a chain of n unit steps, the last also paying the
    // -1 on the other component.
    int cur = src;
    for (long long i = 0; i + 1 < n; ++i) {
      int mid = static_cast<int>(states.size());
      states.push_back({"u" + std::to_string(src) + "_" + std::to_string(i),
                        Player::One});
      add(cur, mid, first_dim ? 1 : 0, first_dim ? 0 : 1);
      cur = mid;
    }
    add(cur, dst, first_dim ? 1 : -1, first_dim ? -1 : 1);
  };
  add_reward(x, y, true);
  add_reward(z, w, false);
  // Sinks get a strictly negative self-loop to keep the arena total.
  std::vector<char> has_out(states.size(), 0);
  for (const Edge& e : edges) has_out[e.src] = 1;
  for (std::size_t v = 0; v < states.size(); ++v) {
    if (!has_out[v]) add(static_cast<int>(v), static_cast<int>(v), -1, -1);
  }
  return GameGraph(2, std::move(states), std::move(edges), w);
}

GameGraph fixture(std::string_view name) {
  if (name == "fig1") {
    return parse_game(
        "mwg 1\n"
        "dim 2\n"
        "state s0 2\n"
        "state s1 1\n"
        "state s2 1\n"
        "edge e1 s0 s1 -2 0\n"
        "edge e2 s0 s2 0 0\n"
        "edge e3 s1 s1 0 0\n"
        "edge e4 s2 s0 -1 1\n"
        "edge e5 s2 s0 1 -1\n"
        "init s0\n");
  }
  if (name == "fig3") {
    return parse_game(
        "mwg 1\n"
        "dim 2\n"
        "state sa 1\n"
        "state sb 1\n"
        "edge loop_a sa sa 2 0\n"
        "edge a_to_b sa sb 0 0\n"
        "edge loop_b sb sb 0 2\n"
        "edge b_to_a sb sa 0 0\n"
        "init sa\n");
  }
  if (name == "barrier") {
    // The two opposing self-loops cancel in the cycle-sum relaxation, but a
    // connected circuit visiting both vertices must cross the +5 edges and
    // can never zero out the third component.
    return parse_game(
        "mwg 1\n"
        "dim 3\n"
        "state u 1\n"
        "state v 1\n"
        "edge uv u v 0 0 5\n"
        "edge vu v u 0 0 5\n"
        "edge loop_u u u 1 -1 0\n"
        "edge loop_v v v -1 1 0\n"
        "init u\n");
  }
  throw GameError("unknown fixture '" + std::string(name) + "'");
}

GameGraph random_game(int states, int dim, int max_weight, double p2_fraction,
                      std::uint64_t seed) {
  if (states < 1 || dim < 1 || max_weight < 0) {
    throw GameError("bad random game parameters");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> weight(-max_weight, max_weight);
  std::vector<State> sv;
  for (int s = 0; s < states; ++s) {
    Player owner = coin(rng) < p2_fraction ? Player::Two : Player::One;
    sv.push_back({"s" + std::to_string(s), owner});
  }
  std::uniform_int_distribution<int> degree(1, std::min(3, states));
  std::uniform_int_distribution<int> target(0, states - 1);
  std::vector<Edge> edges;
  int eid = 0;
  for (int s = 0; s < states; ++s) {
    int deg = degree(rng);
    std::vector<int> dsts;
    while (static_cast<int>(dsts.size()) < deg) {
      int t = target(rng);
      if (std::find(dsts.begin(), dsts.end(), t) == dsts.end()) {
        dsts.push_back(t);
      }
    }
    for (int t : dsts) {
      WeightVector wv(dim);
      for (int d = 0; d < dim; ++d) wv[d] = weight(rng);
      edges.push_back({"e" + std::to_string(++eid), s, t, std::move(wv)});
    }
  }
  return GameGraph(dim, std::move(sv), std::move(edges), 0);
}

bool brute_force_sat(const CnfFormula& phi) {
  validate_cnf(phi);
  if (phi.num_vars > 20) throw GameError("sat oracle limited to 20 variables");
  for (std::uint32_t mask = 0; mask < (1u << phi.num_vars); ++mask) {
    bool all = true;
    for (const auto& cl : phi.clauses) {
      bool sat = false;
      for (int lit : cl) {
        bool val = (mask >> (std::abs(lit) - 1)) & 1;
        if (lit > 0 ? val : !val) sat = true;
      }
      if (!sat) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

namespace {

bool dfs_path(const std::vector<std::vector<int>>& adj, int cur, int goal,
              std::vector<char>& used,
              const std::function<bool(std::vector<char>&)>& next) {
  if (cur == goal) return next(used);
  for (int t : adj[cur]) {
    if (used[t]) continue;
    used[t] = 1;
    if (dfs_path(adj, t, goal, used, next)) return true;
    used[t] = 0;
  }
  return false;
}

}  // namespace

bool brute_force_disjoint_paths(const Digraph& d, int w, int x, int y, int z) {
  validate_digraph(d);
  if (d.n > 12) throw GameError("path oracle limited to 12 vertices");
  for (int t : {w, x, y, z}) {
    if (t < 0 || t >= d.n) throw GameError("terminal vertex out of range");
  }
  if (w == x || w == y || w == z || x == y || x == z || y == z) {
    throw GameError("terminal vertices must be pairwise distinct");
  }
  std::vector<std::vector<int>> adj(d.n);
  for (auto [u, v] : d.edges) adj[u].push_back(v);
  std::vector<char> used(d.n, 0);
  used[w] = 1;
  auto second_leg = [&](std::vector<char>& blocked) {
    if (blocked[y] || blocked[z]) return false;
    std::vector<char> used2 = blocked;
    used2[y] = 1;
    return dfs_path(adj, y, z, used2,
                    [](std::vector<char>&) { return true; });
  };
  return dfs_path(adj, w, x, used, second_leg);
}

CnfFormula parse_dimacs(std::istream& in) {
  CnfFormula phi;
  std::string line;
  int expected_clauses = -1;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (tok == "p") {
      std::string fmt;
      if (!(ls >> fmt >> phi.num_vars >> expected_clauses) || fmt != "cnf") {
        throw GameError("bad DIMACS header");
      }
      continue;
    }
    if (phi.num_vars == 0) throw GameError("DIMACS clause before header");
    std::vector<int> lits;
    int lit = std::stoi(tok);
    while (lit != 0) {
      lits.push_back(lit);
      if (!(ls >> lit)) throw GameError("DIMACS clause not 0-terminated");
    }
    if (lits.empty() || lits.size() > 3) {
      throw GameError("clauses must carry 1..3 literals");
    }
    while (lits.size() < 3) lits.push_back(lits.back());
    phi.clauses.push_back({lits[0], lits[1], lits[2]});
  }
  validate_cnf(phi);
  if (expected_clauses >= 0 &&
      static_cast<int>(phi.clauses.size()) != expected_clauses) {
    throw GameError("DIMACS clause count mismatch");
  }
  return phi;
}

Digraph parse_digraph(std::istream& in) {
  Digraph d;
  std::string line;
  int lineno = 0;
  bool have_n = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (!have_n) {
      int count;
      if (tok != "n" || !(ls >> count) || count < 1) {
        throw GameError("digraph line " + std::to_string(lineno) +
                        ": expected 'n <count>'");
      }
      d.n = count;
      have_n = true;
      continue;
    }
    int u = std::stoi(tok), v;
    if (!(ls >> v)) {
      throw GameError("digraph line " + std::to_string(lineno) +
                      ": expected 'u v'");
    }
    d.edges.emplace_back(u, v);
  }
  if (!have_n) throw GameError("digraph input missing 'n <count>' header");
  validate_digraph(d);
  return d;
}

CnfFormula random_cnf(int max_vars, int max_clauses, std::uint64_t seed) {
  if (max_vars < 1 || max_clauses < 1) throw GameError("bad cnf parameters");
  std::mt19937_64 rng(seed);
  CnfFormula phi;
  phi.num_vars = std::uniform_int_distribution<int>(1, max_vars)(rng);
  int m = std::uniform_int_distribution<int>(1, max_clauses)(rng);
  std::uniform_int_distribution<int> var(1, phi.num_vars);
  std::uniform_int_distribution<int> sign(0, 1);
  for (int j = 0; j < m; ++j) {
    std::array<int, 3> cl;
    for (int i = 0; i < 3; ++i) cl[i] = sign(rng) ? var(rng) : -var(rng);
    phi.clauses.push_back(cl);
  }
  return phi;
}

Digraph random_digraph(int max_vertices, int max_out_degree,
                       std::uint64_t seed) {
  if (max_vertices < 4 || max_out_degree < 0) {
    throw GameError("bad digraph parameters (need >= 4 vertices)");
  }
  std::mt19937_64 rng(seed);
  Digraph d;
  d.n = std::uniform_int_distribution<int>(4, max_vertices)(rng);
  std::uniform_int_distribution<int> degree(0, max_out_degree);
  std::uniform_int_distribution<int> target(0, d.n - 1);
  for (int u = 0; u < d.n; ++u) {
    int deg = degree(rng);
    std::vector<int> dsts;
    for (int i = 0; i < deg; ++i) {
      int t = target(rng);
      if (t != u && std::find(dsts.begin(), dsts.end(), t) == dsts.end()) {
        dsts.push_back(t);
      }
    }
    for (int t : dsts) d.edges.emplace_back(u, t);
  }
  return d;
}

}  // namespace mpg
