#include "mpg/solvers.hpp"

#include <algorithm>
#include <limits>

#include "mpg/multicycle.hpp"
#include "mpg/solvers_single.hpp"

namespace mpg {

namespace {

DimMask resolve_dims(const GameGraph& g, const DimMask& dims) {
  if (dims.empty()) return all_dims(g.dimension());
  DimMask d = dims;
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  for (int x : d) {
    if (x < 0 || x >= g.dimension()) throw GameError("bad dimension index");
  }
  return d;
}

void check_enumeration_guard(const GameGraph& g, Player player,
                             const EnumOptions& options) {
  std::uint64_t count = count_memoryless_strategies(g, player);
  if (count > options.max_strategies && !options.force) {
    throw GameError("instance has " + std::to_string(count) +
                    " candidate strategies, above the enumeration guard; "
                    "re-run with --force to proceed");
  }
}

// Per-state flag: from this state (ownership ignored) some SCC carrying a
// nonnegative multi-cycle on the active dimensions is reachable.
std::vector<char> states_reaching_good_scc(const GameGraph& g,
                                           const DimMask& dims) {
  std::vector<std::vector<int>> sccs = scc_decomposition(g);
  std::vector<int> comp_of(g.num_states(), -1);
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    for (int s : sccs[c]) comp_of[s] = static_cast<int>(c);
  }
  std::vector<char> good(sccs.size(), 0);
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    std::vector<char> in_comp(g.num_states(), 0);
    for (int s : sccs[c]) in_comp[s] = 1;
    std::vector<Edge> internal;
    std::vector<int> order(g.num_states(), -1);
    for (std::size_t i = 0; i < sccs[c].size(); ++i) order[sccs[c][i]] = i;
    for (const Edge& e : g.edges()) {
      if (in_comp[e.src] && in_comp[e.dst]) {
        internal.push_back({e.id, order[e.src], order[e.dst], e.weight});
      }
    }
    if (!internal.empty()) {
      std::vector<State> states;
      for (int s : sccs[c]) states.push_back(g.state(s));
      GameGraph sub(g.dimension(), std::move(states), std::move(internal), 0);
      if (nonneg_multicycle(sub, dims)) good[c] = 1;
    }
  }
  // SCCs arrive in reverse topological order (successors first).
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    if (good[c]) continue;
    for (int s : sccs[c]) {
      for (int e : g.out(s)) {
        if (good[comp_of[g.edge(e).dst]]) {
          good[c] = 1;
          break;
        }
      }
      if (good[c]) break;
    }
  }
  std::vector<char> flag(g.num_states(), 0);
  for (int s = 0; s < g.num_states(); ++s) flag[s] = good[comp_of[s]];
  return flag;
}

}  // namespace

std::uint64_t count_memoryless_strategies(const GameGraph& g, Player player) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max() / 2;
  std::uint64_t count = 1;
  for (int s = 0; s < g.num_states(); ++s) {
    if (g.state(s).owner != player) continue;
    std::uint64_t deg = g.out(s).size();
    if (deg == 0) continue;
    if (count > kMax / deg) return kMax;
    count *= deg;
  }
  return count;
}

std::uint64_t for_each_memoryless_strategy(
    const GameGraph& g, Player player,
    const std::function<bool(const MemorylessStrategy&)>& fn) {
  std::vector<int> owned;
  for (int s = 0; s < g.num_states(); ++s) {
    if (g.state(s).owner == player) owned.push_back(s);
  }
  std::vector<std::size_t> digit(owned.size(), 0);
  MemorylessStrategy strat;
  strat.owner = player;
  std::uint64_t visited = 0;
  while (true) {
    strat.choice.assign(g.num_states(), -1);
    for (std::size_t i = 0; i < owned.size(); ++i) {
      strat.choice[owned[i]] = g.out(owned[i])[digit[i]];
    }
    ++visited;
    if (!fn(strat)) return visited;
    std::size_t i = 0;
    while (i < owned.size()) {
      if (++digit[i] < g.out(owned[i]).size()) break;
      digit[i] = 0;
      ++i;
    }
    if (i == owned.size()) return visited;
  }
}

SolveReport solve_mp_sup_region(const GameGraph& g, const DimMask& dims) {
  DimMask active = resolve_dims(g, dims);
  SolveReport report;
  report.method = "iterative-removal";
  std::vector<int> cur(g.num_states());
  for (int s = 0; s < g.num_states(); ++s) cur[s] = s;
  bool alive = true;
  while (alive) {
    bool removed = false;
    for (int d : active) {
      if (cur.empty()) break;
      GameGraph sub = restrict(g, cur);
      std::vector<int> region = solve_single_mp_sup(sub, d);
      if (region.size() == cur.size()) continue;
      removed = true;
      std::vector<int> next;
      next.reserve(region.size());
      for (int s : region) next.push_back(cur[s]);
      cur = std::move(next);
      if (cur.empty()) break;
    }
    alive = removed && !cur.empty();
  }
  report.winning_region = cur;
  report.yes = sorted_contains(cur, g.initial());
  return report;
}

bool solve_one_player_mp_inf(const GameGraph& g, int s0, const DimMask& dims) {
  for (const State& s : g.states()) {
    if (s.owner != Player::One) {
      throw GameError("one-player solver found a player-2 state ('" + s.name +
                      "')");
    }
  }
  return reachable_scc_has_nonneg_multicycle(g, s0, resolve_dims(g, dims));
}

SolveReport solve_energy_unknown_credit(const GameGraph& g, int s0,
                                        const EnumOptions& options) {
  if (s0 < 0 || s0 >= g.num_states()) throw GameError("unknown state");
  check_enumeration_guard(g, Player::Two, options);
  SolveReport report;
  report.method = "enum";
  report.yes = true;
  report.stats.strategies_enumerated = for_each_memoryless_strategy(
      g, Player::Two, [&](const MemorylessStrategy& l2) {
        if (!nonneg_circuit_reachable(fix_strategy(g, l2), s0)) {
          report.yes = false;
          report.p2_certificate = l2;
          return false;
        }
        return true;
      });
  if (report.yes && options.extract_p1_cert) {
    report.p1_certificate = extract_finite_strategy(g, s0);
  }
  return report;
}

SolveReport solve_finite_memory_mp(const GameGraph& g, int s0,
                                   const ExtractOptions& options) {
  SolveReport report;
  report.method = "capped";
  report.p1_certificate = extract_finite_strategy(g, s0, options);
  report.yes = report.p1_certificate.has_value();
  return report;
}

SolveReport solve_mp_inf(const GameGraph& g, int s0, const DimMask& dims,
                         const EnumOptions& options) {
  if (s0 < 0 || s0 >= g.num_states()) throw GameError("unknown state");
  DimMask active = resolve_dims(g, dims);
  check_enumeration_guard(g, Player::Two, options);
  SolveReport report;
  report.method = "enum";
  report.yes = true;
  report.stats.strategies_enumerated = for_each_memoryless_strategy(
      g, Player::Two, [&](const MemorylessStrategy& l2) {
        if (!reachable_scc_has_nonneg_multicycle(fix_strategy(g, l2), s0,
                                                 active)) {
          report.yes = false;
          report.p2_certificate = l2;
          return false;
        }
        return true;
      });
  return report;
}

SolveReport solve_mp_infsup(const GameGraph& g, const std::vector<int>& I,
                            const std::vector<int>& J, int s0,
                            const EnumOptions& options) {
  if (s0 < 0 || s0 >= g.num_states()) throw GameError("unknown state");
  DimMask inf = I, sup = J;
  std::sort(inf.begin(), inf.end());
  std::sort(sup.begin(), sup.end());
  for (int d : inf) {
    if (sorted_contains(sup, d)) {
      throw GameError("inf and sup dimension sets overlap");
    }
  }
  if (inf.empty()) {
    SolveReport report = solve_mp_sup_region(g, sup);
    report.yes = sorted_contains(report.winning_region, s0);
    return report;
  }
  if (sup.empty()) return solve_mp_inf(g, s0, inf, options);

  check_enumeration_guard(g, Player::Two, options);
  SolveReport report;
  report.method = "infsup-removal";
  std::vector<int> cur(g.num_states());
  for (int s = 0; s < g.num_states(); ++s) cur[s] = s;
  bool first_pass = true;
  bool removed = true;
  while (removed && !cur.empty()) {
    removed = false;
    for (int l : sup) {
      if (cur.empty()) break;
      DimMask dims = inf;
      dims.insert(std::upper_bound(dims.begin(), dims.end(), l), l);
      GameGraph sub = restrict(g, cur);
      // Player 2 wins MeanPayoffInf on I+{l} from s iff some memoryless
      // choice leaves no reachable nonnegative multi-cycle from s.
      std::vector<char> p2_win(sub.num_states(), 0);
      report.stats.strategies_enumerated += for_each_memoryless_strategy(
          sub, Player::Two, [&](const MemorylessStrategy& l2) {
            GameGraph fixed = fix_strategy(sub, l2);
            std::vector<char> good = states_reaching_good_scc(fixed, dims);
            for (int s = 0; s < sub.num_states(); ++s) {
              if (!good[s] && !p2_win[s]) {
                p2_win[s] = 1;
                if (first_pass && cur[s] == s0 && !report.p2_certificate) {
                  report.p2_certificate = l2;
                }
              }
            }
            return true;
          });
      std::vector<int> bad;
      for (int s = 0; s < sub.num_states(); ++s) {
        if (p2_win[s]) bad.push_back(s);
      }
      if (bad.empty()) continue;
      removed = true;
      std::vector<int> attr = attractor(sub, Player::Two, bad);
      std::vector<int> next;
      for (int s = 0; s < sub.num_states(); ++s) {
        if (!sorted_contains(attr, s)) next.push_back(cur[s]);
      }
      cur = std::move(next);
    }
    first_pass = false;
  }
  report.winning_region = cur;
  report.yes = sorted_contains(cur, s0);
  if (report.yes) report.p2_certificate.reset();
  return report;
}

std::optional<MemorylessStrategy> solve_memoryless_player1(
    const GameGraph& g, int s0, const EnumOptions& options) {
  if (s0 < 0 || s0 >= g.num_states()) throw GameError("unknown state");
  check_enumeration_guard(g, Player::One, options);
  std::optional<MemorylessStrategy> found;
  for_each_memoryless_strategy(
      g, Player::One, [&](const MemorylessStrategy& l1) {
        GameGraph fixed = fix_strategy(g, l1);
        // Forward closure from s0 in the fixed graph.
        std::vector<char> reach(fixed.num_states(), 0);
        std::vector<int> stack{s0};
        reach[s0] = 1;
        while (!stack.empty()) {
          int v = stack.back();
          stack.pop_back();
          for (int e : fixed.out(v)) {
            int d = fixed.edge(e).dst;
            if (!reach[d]) {
              reach[d] = 1;
              stack.push_back(d);
            }
          }
        }
        // Accept iff no reachable cycle is negative in any dimension.
        for (int dim = 0; dim < g.dimension(); ++dim) {
          std::vector<long long> dist(fixed.num_states(), 0);
          bool changed = true;
          for (int it = 0; it < fixed.num_states() && changed; ++it) {
            changed = false;
            for (const Edge& e : fixed.edges()) {
              if (!reach[e.src]) continue;
              if (dist[e.src] + e.weight[dim] < dist[e.dst]) {
                dist[e.dst] = dist[e.src] + e.weight[dim];
                changed = true;
              }
            }
          }
          if (changed) return true;  // negative cycle: try the next strategy
        }
        found = l1;
        return false;
      });
  return found;
}

}  // namespace mpg
