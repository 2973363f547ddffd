#include "mpg/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "mpg/solvers_single.hpp"

namespace mpg {

namespace {

void validate_memoryless(const GameGraph& g, const MemorylessStrategy& s) {
  if (s.choice.size() != static_cast<std::size_t>(g.num_states())) {
    throw GameError("memoryless strategy has wrong state count");
  }
  for (int st = 0; st < g.num_states(); ++st) {
    bool owned = g.state(st).owner == s.owner;
    int e = s.choice[st];
    if (!owned) continue;
    if (e < 0 || e >= g.num_edges() || g.edge(e).src != st) {
      throw GameError("memoryless strategy: bad choice at state '" +
                      g.state(st).name + "'");
    }
  }
}

void validate_moore(const GameGraph& g, const MooreStrategy& s) {
  if (s.memory_count < 1 || s.initial_memory < 0 ||
      s.initial_memory >= s.memory_count) {
    throw GameError("moore strategy: bad memory bounds");
  }
  if (s.update.size() != static_cast<std::size_t>(s.memory_count) ||
      s.next.size() != static_cast<std::size_t>(s.memory_count)) {
    throw GameError("moore strategy: table row count mismatch");
  }
  for (int m = 0; m < s.memory_count; ++m) {
    if (s.update[m].size() != static_cast<std::size_t>(g.num_states()) ||
        s.next[m].size() != static_cast<std::size_t>(g.num_states())) {
      throw GameError("moore strategy: table column count mismatch");
    }
    for (int st = 0; st < g.num_states(); ++st) {
      int mm = s.update[m][st];
      if (mm < 0 || mm >= s.memory_count) {
        throw GameError("moore strategy: bad memory update");
      }
      if (g.state(st).owner == s.owner) {
        int e = s.next[m][st];
        if (e < 0 || e >= g.num_edges() || g.edge(e).src != st) {
          throw GameError("moore strategy: bad move at state '" +
                          g.state(st).name + "'");
        }
      }
    }
  }
}

}  // namespace

GameGraph fix_strategy(const GameGraph& g, const MemorylessStrategy& lambda) {
  validate_memoryless(g, lambda);
  std::vector<State> states;
  states.reserve(g.num_states());
  for (const State& s : g.states()) states.push_back({s.name, Player::One});
  std::vector<Edge> edges;
  for (int e = 0; e < g.num_edges(); ++e) {
    int src = g.edge(e).src;
    if (g.state(src).owner == lambda.owner && lambda.choice[src] != e) {
      continue;
    }
    edges.push_back(g.edge(e));
  }
  return GameGraph(g.dimension(), std::move(states), std::move(edges),
                   g.initial());
}

MooreStrategy as_moore(const GameGraph& g, const MemorylessStrategy& s) {
  MooreStrategy m;
  m.owner = s.owner;
  m.memory_count = 1;
  m.initial_memory = 0;
  m.update.assign(1, std::vector<int>(g.num_states(), 0));
  m.next.assign(1, s.choice);
  return m;
}

ProductGraph product_graph(const GameGraph& g, const MooreStrategy& strat,
                           int s0) {
  validate_moore(g, strat);
  if (s0 < 0 || s0 >= g.num_states()) throw GameError("unknown state");
  ProductGraph p;
  std::map<std::pair<int, int>, int> index;
  auto intern = [&](int m, int s) {
    auto it = index.find({m, s});
    if (it != index.end()) return it->second;
    int id = static_cast<int>(p.nodes.size());
    index.emplace(std::make_pair(m, s), id);
    p.nodes.push_back({m, s});
    p.succ.emplace_back();
    return id;
  };
  p.initial = intern(strat.initial_memory, s0);
  for (std::size_t qi = 0; qi < p.nodes.size(); ++qi) {
    int m = p.nodes[qi].memory;
    int s = p.nodes[qi].state;
    int m2 = strat.update[m][s];
    if (g.state(s).owner == strat.owner) {
      int e = strat.next[m][s];
      int id = intern(m2, g.edge(e).dst);
      p.succ[qi].push_back({id, e});
    } else {
      for (int e : g.out(s)) {
        int id = intern(m2, g.edge(e).dst);
        p.succ[qi].push_back({id, e});
      }
    }
  }
  return p;
}

ProductGraph product_graph(const GameGraph& g, const MemorylessStrategy& strat,
                           int s0) {
  validate_memoryless(g, strat);
  return product_graph(g, as_moore(g, strat), s0);
}

bool verify_p2_certificate(const GameGraph& g_in, const MemorylessStrategy& l2,
                           int s0, const ObjectiveSpec& objective) {
  if (l2.owner != Player::Two) {
    throw GameError("player-2 certificate expected");
  }
  GameGraph g = objective.thresholds.empty()
                    ? g_in
                    : shift_weights(g_in, objective.thresholds);
  GameGraph fixed = fix_strategy(g, l2);
  DimMask inf(objective.inf_dims.begin(), objective.inf_dims.end());
  switch (objective.kind) {
    case ObjectiveKind::EnergyUnknownCredit:
    case ObjectiveKind::FiniteMemoryMP:
      return !nonneg_circuit_reachable(fixed, s0);
    case ObjectiveKind::MPInf:
      return !reachable_scc_has_nonneg_multicycle(fixed, s0, inf);
    case ObjectiveKind::MPInfSup: {
      if (objective.sup_dims.empty()) {
        return !reachable_scc_has_nonneg_multicycle(fixed, s0, inf);
      }
      // Refuting MeanPayoffInf on I+{l} for one l refutes the conjunct
      // Phi_l and therefore the whole objective.
      for (int l : objective.sup_dims) {
        DimMask dims = inf;
        dims.push_back(l);
        if (!reachable_scc_has_nonneg_multicycle(fixed, s0, dims)) {
          return true;
        }
      }
      return false;
    }
    case ObjectiveKind::MPSup:
      throw GameError(
          "player-2 refutations of MPSup are region-based; unsupported here");
  }
  throw GameError("bad objective kind");
}

namespace {

struct ShortestWalks {
  bool negative_cycle = false;
  std::vector<long long> dist;          // per product node
  std::vector<std::pair<int, int>> pred;  // (node, edge), -1 = none
};

ShortestWalks product_shortest(const GameGraph& g, const ProductGraph& p,
                               int dim) {
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  ShortestWalks sw;
  sw.dist.assign(p.nodes.size(), kInf);
  sw.pred.assign(p.nodes.size(), {-1, -1});
  sw.dist[p.initial] = 0;
  std::size_t n = p.nodes.size();
  for (std::size_t it = 0; it < n; ++it) {
    bool changed = false;
    for (std::size_t u = 0; u < n; ++u) {
      if (sw.dist[u] >= kInf) continue;
      for (auto [v, e] : p.succ[u]) {
        long long nd = sw.dist[u] + g.edge(e).weight[dim];
        if (nd < sw.dist[v]) {
          sw.dist[v] = nd;
          sw.pred[v] = {static_cast<int>(u), e};
          changed = true;
        }
      }
    }
    if (!changed) return sw;
  }
  // One more pass: any further relaxation exposes a negative cycle.
  for (std::size_t u = 0; u < n; ++u) {
    if (sw.dist[u] >= kInf) continue;
    for (auto [v, e] : p.succ[u]) {
      if (sw.dist[u] + g.edge(e).weight[dim] < sw.dist[v]) {
        sw.negative_cycle = true;
        return sw;
      }
    }
  }
  return sw;
}

}  // namespace

std::optional<CreditVector> score_p1_finite_strategy(const GameGraph& g,
                                                     const MooreStrategy& strat,
                                                     int s0) {
  if (strat.owner != Player::One) {
    throw GameError("player-1 strategy expected");
  }
  ProductGraph p = product_graph(g, strat, s0);
  CreditVector credit;
  credit.v.assign(g.dimension(), 0);
  for (int d = 0; d < g.dimension(); ++d) {
    ShortestWalks sw = product_shortest(g, p, d);
    if (sw.negative_cycle) return std::nullopt;
    long long lo = 0;
    for (std::size_t u = 0; u < p.nodes.size(); ++u) {
      if (sw.dist[u] < lo) lo = sw.dist[u];
    }
    credit.v[d] = -lo;
  }
  return credit;
}

std::optional<PlayPrefix> argmin_prefix(const GameGraph& g,
                                        const MooreStrategy& strat, int s0,
                                        int dim) {
  if (dim < 0 || dim >= g.dimension()) throw GameError("bad dimension index");
  ProductGraph p = product_graph(g, strat, s0);
  ShortestWalks sw = product_shortest(g, p, dim);
  if (sw.negative_cycle) return std::nullopt;
  int best = p.initial;
  for (std::size_t u = 0; u < p.nodes.size(); ++u) {
    if (sw.dist[u] < sw.dist[best]) best = static_cast<int>(u);
  }
  std::vector<int> rev_states, rev_edges;
  int cur = best;
  while (cur != -1) {
    rev_states.push_back(p.nodes[cur].state);
    auto [pn, pe] = sw.pred[cur];
    if (pn != -1) rev_edges.push_back(pe);
    cur = pn;
  }
  PlayPrefix pref;
  pref.states.assign(rev_states.rbegin(), rev_states.rend());
  pref.edges.assign(rev_edges.rbegin(), rev_edges.rend());
  return pref;
}

namespace {

// Capped safety arena node bookkeeping. Credits are encoded in mixed radix
// base (C+1)^k on top of the state index.
struct CappedArena {
  const GameGraph& g;
  long long cap;
  std::vector<long long> pow;  // pow[d] = (cap+1)^d

  CappedArena(const GameGraph& g_, long long cap_) : g(g_), cap(cap_) {
    pow.assign(g.dimension() + 1, 1);
    for (int d = 0; d < g.dimension(); ++d) {
      if (pow[d] > std::numeric_limits<long long>::max() / (cap + 1)) {
        throw GameError("capped arena exceeds the size guard");
      }
      pow[d + 1] = pow[d] * (cap + 1);
    }
  }

  long long key(int state, const std::vector<long long>& credit) const {
    long long k = 0;
    for (int d = 0; d < g.dimension(); ++d) k += credit[d] * pow[d];
    return k * g.num_states() + state;
  }
  int key_state(long long k) const {
    return static_cast<int>(k % g.num_states());
  }
  std::vector<long long> key_credit(long long k) const {
    long long c = k / g.num_states();
    std::vector<long long> credit(g.dimension());
    for (int d = 0; d < g.dimension(); ++d) {
      credit[d] = c % (cap + 1);
      c /= (cap + 1);
    }
    return credit;
  }

  // Saturating add; false when some component drops below zero.
  bool step(const std::vector<long long>& credit, const WeightVector& w,
            std::vector<long long>* out) const {
    out->resize(g.dimension());
    for (int d = 0; d < g.dimension(); ++d) {
      long long c = credit[d] + w[d];
      if (c < 0) return false;
      (*out)[d] = std::min(c, cap);
    }
    return true;
  }
};

// Merge memory states with identical move rows and equivalent update rows
// (Moore-machine partition refinement); keeps extracted machines small.
MooreStrategy minimize_moore(const GameGraph& g, const MooreStrategy& in) {
  const int m = in.memory_count;
  std::vector<int> cls(m, 0);
  // Initial split by the next-move row.
  {
    std::map<std::vector<int>, int> by_next;
    for (int i = 0; i < m; ++i) {
      auto [it, fresh] =
          by_next.emplace(in.next[i], static_cast<int>(by_next.size()));
      cls[i] = it->second;
    }
  }
  while (true) {
    std::map<std::pair<int, std::vector<int>>, int> sig;
    std::vector<int> next_cls(m);
    for (int i = 0; i < m; ++i) {
      std::vector<int> row(g.num_states());
      for (int s = 0; s < g.num_states(); ++s) row[s] = cls[in.update[i][s]];
      auto [it, fresh] = sig.emplace(
          std::make_pair(cls[i], std::move(row)), static_cast<int>(sig.size()));
      next_cls[i] = it->second;
    }
    if (next_cls == cls) break;
    cls = std::move(next_cls);
  }
  int classes = 1 + *std::max_element(cls.begin(), cls.end());
  if (classes == m) return in;
  MooreStrategy out;
  out.owner = in.owner;
  out.memory_count = classes;
  out.initial_memory = cls[in.initial_memory];
  out.update.assign(classes, std::vector<int>(g.num_states(), 0));
  out.next.assign(classes, std::vector<int>(g.num_states(), -1));
  for (int i = 0; i < m; ++i) {
    out.next[cls[i]] = in.next[i];
    for (int s = 0; s < g.num_states(); ++s) {
      out.update[cls[i]][s] = cls[in.update[i][s]];
    }
  }
  return out;
}

// Player-2 parallel edges to the same successor collapse to their
// componentwise minimum (pessimistic, sound: the tracked energy is a lower
// bound on the real one).
std::vector<std::pair<int, WeightVector>> p2_moves(const GameGraph& g,
                                                   int state) {
  std::map<int, WeightVector> by_dst;
  for (int e : g.out(state)) {
    const Edge& ed = g.edge(e);
    auto [it, fresh] = by_dst.emplace(ed.dst, ed.weight);
    if (!fresh) {
      for (int d = 0; d < g.dimension(); ++d) {
        it->second[d] = std::min(it->second[d], ed.weight[d]);
      }
    }
  }
  return {by_dst.begin(), by_dst.end()};
}

}  // namespace

std::optional<std::pair<MooreStrategy, CreditVector>> extract_finite_strategy(
    const GameGraph& g, int s0, const ExtractOptions& options) {
  if (s0 < 0 || s0 >= g.num_states()) throw GameError("unknown state");
  const long long nW =
      static_cast<long long>(g.num_states()) * g.max_abs_weight();
  const long long cap = options.cap >= 0 ? options.cap : 2 * nW;
  CappedArena arena(g, cap);
  std::vector<long long> c0(g.dimension(), std::min(cap, nW));

  // Forward exploration of the reachable arena.
  std::unordered_map<long long, int> id_of;
  std::vector<long long> keys;
  std::vector<std::vector<int>> succ;   // arena node ids
  std::vector<std::vector<int>> move;   // p1: edge index per successor
  std::vector<char> unsafe;
  auto intern = [&](long long k) {
    auto it = id_of.find(k);
    if (it != id_of.end()) return it->second;
    int id = static_cast<int>(keys.size());
    if (keys.size() >= options.max_arena) {
      throw GameError("capped arena exceeds the size guard");
    }
    id_of.emplace(k, id);
    keys.push_back(k);
    succ.emplace_back();
    move.emplace_back();
    unsafe.push_back(0);
    return id;
  };
  int start = intern(arena.key(s0, c0));
  std::vector<long long> scratch;
  for (std::size_t qi = 0; qi < keys.size(); ++qi) {
    int state = arena.key_state(keys[qi]);
    std::vector<long long> credit = arena.key_credit(keys[qi]);
    if (g.state(state).owner == Player::One) {
      for (int e : g.out(state)) {
        if (!arena.step(credit, g.edge(e).weight, &scratch)) continue;
        int id = intern(arena.key(g.edge(e).dst, scratch));
        succ[qi].push_back(id);
        move[qi].push_back(e);
      }
      if (succ[qi].empty()) unsafe[qi] = 1;
    } else {
      for (const auto& [dst, w] : p2_moves(g, state)) {
        if (!arena.step(credit, w, &scratch)) {
          unsafe[qi] = 1;
          succ[qi].clear();
          break;
        }
        int id = intern(arena.key(dst, scratch));
        succ[qi].push_back(id);
      }
    }
  }

  // Backward safety fixpoint.
  std::vector<std::vector<int>> preds(keys.size());
  std::vector<int> safe_succ(keys.size(), 0);
  for (std::size_t u = 0; u < keys.size(); ++u) {
    for (int v : succ[u]) preds[v].push_back(static_cast<int>(u));
    safe_succ[u] = static_cast<int>(succ[u].size());
  }
  std::deque<int> dead;
  for (std::size_t u = 0; u < keys.size(); ++u) {
    if (unsafe[u]) dead.push_back(static_cast<int>(u));
  }
  while (!dead.empty()) {
    int u = dead.front();
    dead.pop_front();
    for (int pnode : preds[u]) {
      if (unsafe[pnode]) continue;
      bool p1 = g.state(arena.key_state(keys[pnode])).owner == Player::One;
      if (p1) {
        if (--safe_succ[pnode] <= 0) {
          unsafe[pnode] = 1;
          dead.push_back(pnode);
        }
      } else {
        unsafe[pnode] = 1;
        dead.push_back(pnode);
      }
    }
  }
  if (unsafe[start]) return std::nullopt;

  // Positional arena choice for player 1: first declared safe move.
  std::vector<int> choice(keys.size(), -1);
  for (std::size_t u = 0; u < keys.size(); ++u) {
    if (unsafe[u]) continue;
    if (g.state(arena.key_state(keys[u])).owner != Player::One) continue;
    for (std::size_t i = 0; i < succ[u].size(); ++i) {
      if (!unsafe[succ[u][i]]) {
        choice[u] = move[u][i];
        break;
      }
    }
  }

  // Memory states: m0 plus the safe arena nodes reachable when player 1
  // follows its choice and player 2 plays anything.
  std::vector<int> mem_of(keys.size(), -1);
  std::vector<int> mem_nodes;  // arena node per memory state (index-1)
  std::vector<int> frontier{start};
  mem_of[start] = 0;
  mem_nodes.push_back(start);
  for (std::size_t qi = 0; qi < frontier.size(); ++qi) {
    int u = frontier[qi];
    bool p1 = g.state(arena.key_state(keys[u])).owner == Player::One;
    for (std::size_t i = 0; i < succ[u].size(); ++i) {
      if (p1 && move[u][i] != choice[u]) continue;
      int v = succ[u][i];
      if (mem_of[v] == -1) {
        mem_of[v] = static_cast<int>(mem_nodes.size());
        mem_nodes.push_back(v);
        frontier.push_back(v);
      }
    }
  }

  MooreStrategy ms;
  ms.owner = Player::One;
  ms.memory_count = static_cast<int>(mem_nodes.size()) + 1;  // +1 for m0
  ms.initial_memory = 0;
  ms.update.assign(ms.memory_count,
                   std::vector<int>(g.num_states(), 0));
  ms.next.assign(ms.memory_count, std::vector<int>(g.num_states(), -1));
  auto first_edge = [&](int s) { return g.out(s).front(); };
  auto choice_at = [&](int state, const std::vector<long long>& credit) {
    auto it = id_of.find(arena.key(state, credit));
    if (it == id_of.end() || unsafe[it->second]) return -1;
    return it->second;
  };

  // Row m0: before any move the play must be at s0 with credit c0.
  for (int s = 0; s < g.num_states(); ++s) {
    if (g.state(s).owner == Player::One) ms.next[0][s] = first_edge(s);
    if (s == s0) {
      ms.update[0][s] = mem_of[start] + 1;
      if (g.state(s).owner == Player::One) {
        ms.next[0][s] = choice[start] != -1 ? choice[start] : first_edge(s);
      }
    }
  }
  // Rows for memory (prev_state, prev_credit): folding the current state s
  // replays the traversed step to recover the credit at s.
  std::vector<long long> cred;
  for (std::size_t mi = 0; mi < mem_nodes.size(); ++mi) {
    int u = mem_nodes[mi];
    int prev_state = arena.key_state(keys[u]);
    std::vector<long long> prev_credit = arena.key_credit(keys[u]);
    bool prev_p1 = g.state(prev_state).owner == Player::One;
    int row = static_cast<int>(mi) + 1;
    for (int s = 0; s < g.num_states(); ++s) {
      int node = -1;
      if (prev_p1) {
        int e = choice[u];
        if (e != -1 && g.edge(e).dst == s &&
            arena.step(prev_credit, g.edge(e).weight, &cred)) {
          node = choice_at(s, cred);
        }
      } else {
        for (const auto& [dst, w] : p2_moves(g, prev_state)) {
          if (dst == s && arena.step(prev_credit, w, &cred)) {
            node = choice_at(s, cred);
          }
        }
      }
      if (node != -1 && mem_of[node] != -1) {
        ms.update[row][s] = mem_of[node] + 1;
      } else {
        ms.update[row][s] = 0;  // inconsistent history; never reached
      }
      if (g.state(s).owner == Player::One) {
        int e = node != -1 ? choice[node] : -1;
        ms.next[row][s] = e != -1 ? e : first_edge(s);
      }
    }
  }

  CreditVector credit;
  credit.v = c0;
  return std::make_pair(minimize_moore(g, ms), std::move(credit));
}

EpsilonSchedule pump_schedule_from_witness(const GameGraph& scc,
                                           const MultiCycleWitness& witness,
                                           const Rat& alpha) {
  if (sgn(alpha) <= 0) throw GameError("alpha must be positive");
  if (!verify_multicycle_witness(scc, witness)) {
    throw GameError("witness does not verify against the given component");
  }
  const long long n = scc.num_states();
  const long long W = scc.max_abs_weight();
  auto ceil_rat = [](const Rat& r) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(),
               r.get_den().get_mpz_t());
    if (!q.fits_slong_p()) throw GameError("schedule bound overflow");
    return q.get_si();
  };
  EpsilonSchedule sched;
  sched.alpha = alpha;
  sched.Z = std::max<long long>(
      1, ceil_rat(Rat(static_cast<long>((n + 2) * W)) / alpha));

  mpz_class lcm_den = 1;
  for (const auto& item : witness.cycles) {
    mpz_class d = item.factor.get_den();
    mpz_class gcd;
    mpz_gcd(gcd.get_mpz_t(), lcm_den.get_mpz_t(), d.get_mpz_t());
    lcm_den = lcm_den / gcd * d;
  }

  // Shortest connector paths via BFS (edge count).
  auto bfs_path = [&](int from, int to) {
    std::vector<int> pred_edge(scc.num_states(), -1);
    std::vector<char> seen(scc.num_states(), 0);
    std::deque<int> q{from};
    seen[from] = 1;
    if (from == to) return std::vector<int>{};
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int e : scc.out(v)) {
        int d = scc.edge(e).dst;
        if (seen[d]) continue;
        seen[d] = 1;
        pred_edge[d] = e;
        if (d == to) {
          std::vector<int> path;
          int cur = to;
          while (cur != from) {
            path.push_back(pred_edge[cur]);
            cur = scc.edge(pred_edge[cur]).src;
          }
          std::reverse(path.begin(), path.end());
          return path;
        }
        q.push_back(d);
      }
    }
    throw GameError("witness cycles not mutually reachable");
  };

  long long steps_per_pass = 0;
  for (std::size_t j = 0; j < witness.cycles.size(); ++j) {
    const auto& item = witness.cycles[j];
    EpsilonSchedule::Round round;
    round.cycle = item.edges;
    Rat scaled = item.factor * Rat(lcm_den);
    if (!scaled.get_num().fits_slong_p()) {
      throw GameError("schedule multiplicity overflow");
    }
    round.repetitions = sched.Z * scaled.get_num().get_si();
    int anchor = scc.edge(item.edges.front()).src;
    int next_anchor =
        scc.edge(witness.cycles[(j + 1) % witness.cycles.size()]
                     .edges.front())
            .src;
    round.connector = bfs_path(anchor, next_anchor);
    steps_per_pass +=
        round.repetitions * static_cast<long long>(round.cycle.size()) +
        static_cast<long long>(round.connector.size());
    sched.rounds.push_back(std::move(round));
  }
  sched.start_state = scc.edge(witness.cycles.front().edges.front()).src;
  sched.warmup = ceil_rat(
      Rat(static_cast<long>(2 * steps_per_pass * n * W)) / alpha);
  return sched;
}

ScheduleTrace simulate_schedule(const GameGraph& g,
                                const EpsilonSchedule& sched,
                                long long horizon) {
  if (horizon < sched.warmup) {
    throw GameError("horizon below the schedule warmup bound");
  }
  ScheduleTrace trace;
  trace.post_warmup_min_average.assign(g.dimension(), Rat(0));
  std::vector<bool> have_min(g.dimension(), false);
  std::vector<long long> sum(g.dimension(), 0);
  int cur = sched.start_state;
  long long t = 0;
  auto take = [&](int e) {
    if (g.edge(e).src != cur) {
      throw GameError("schedule step does not leave the current state");
    }
    for (int d = 0; d < g.dimension(); ++d) sum[d] += g.edge(e).weight[d];
    cur = g.edge(e).dst;
    ++t;
    if (t > sched.warmup) {
      for (int d = 0; d < g.dimension(); ++d) {
        Rat avg(static_cast<long>(sum[d]), static_cast<long>(t));
        avg.canonicalize();
        if (!have_min[d] || avg < trace.post_warmup_min_average[d]) {
          trace.post_warmup_min_average[d] = avg;
          have_min[d] = true;
        }
      }
    }
    return t >= horizon;
  };
  bool done = false;
  while (!done) {
    for (const auto& round : sched.rounds) {
      for (long long r = 0; r < round.repetitions && !done; ++r) {
        for (int e : round.cycle) {
          if ((done = take(e))) break;
        }
      }
      if (done) break;
      for (int e : round.connector) {
        if ((done = take(e))) break;
      }
      if (done) break;
    }
  }
  trace.steps = t;
  Rat bound = Rat(-2) * sched.alpha;
  trace.bound_met = true;
  for (int d = 0; d < g.dimension(); ++d) {
    if (have_min[d] && trace.post_warmup_min_average[d] < bound) {
      trace.bound_met = false;
    }
  }
  return trace;
}

InterleaveTrace simulate_interleaved_sup(
    const GameGraph& g, const std::vector<MemorylessStrategy>& lambda1,
    int s0, int phases, long long max_steps) {
  if (s0 < 0 || s0 >= g.num_states()) throw GameError("unknown state");
  for (const State& s : g.states()) {
    if (s.owner != Player::One) {
      throw GameError("interleaving simulator needs a one-player game");
    }
  }
  const int k = g.dimension();
  if (static_cast<int>(lambda1.size()) != k) {
    throw GameError("need one strategy per dimension");
  }
  for (int d = 0; d < k; ++d) {
    validate_memoryless(g, lambda1[d]);
    std::vector<int> region = solve_single_mp_sup(g, d);
    if (static_cast<int>(region.size()) != g.num_states()) {
      throw GameError("dimension " + std::to_string(d + 1) +
                      " is not winnable from every state");
    }
  }
  const long long W = g.max_abs_weight();
  InterleaveTrace trace;
  std::vector<long long> sum(k, 0);
  int cur = s0;
  long long T = 0;
  for (int p = 0; p < phases; ++p) {
    int dim = p % k;
    Rat alpha(1, 1L << (p / k + 1));
    // Z = ceil(L*W/alpha) with L the current play length.
    Rat zr = Rat(static_cast<long>(T * W)) / alpha;
    mpz_class zq;
    mpz_cdiv_q(zq.get_mpz_t(), zr.get_num().get_mpz_t(),
               zr.get_den().get_mpz_t());
    long long Z = std::max<long long>(1, zq.get_si());
    long long phase_steps = 0;
    long long phase_sum = 0;
    while (true) {
      int e = lambda1[dim].choice[cur];
      for (int d = 0; d < k; ++d) sum[d] += g.edge(e).weight[d];
      phase_sum += g.edge(e).weight[dim];
      cur = g.edge(e).dst;
      ++T;
      ++phase_steps;
      if (T >= max_steps) {
        trace.timed_out = true;
        return trace;
      }
      if (phase_steps >= Z &&
          Rat(static_cast<long>(phase_sum)) >=
              Rat(-1) * alpha * Rat(static_cast<long>(phase_steps))) {
        break;
      }
    }
    InterleaveTrace::Phase ph;
    ph.dim = dim;
    ph.alpha = alpha;
    ph.boundary_step = T;
    for (int d = 0; d < k; ++d) {
      Rat avg(static_cast<long>(sum[d]), static_cast<long>(T));
      avg.canonicalize();
      ph.prefix_average.push_back(avg);
    }
    ph.bound_met = ph.prefix_average[dim] >= Rat(-2) * alpha;
    trace.phases.push_back(std::move(ph));
  }
  return trace;
}

std::string serialize_certificate(const GameGraph& g, const Certificate& c) {
  std::ostringstream os;
  if (std::holds_alternative<MemorylessStrategy>(c)) {
    const auto& s = std::get<MemorylessStrategy>(c);
    validate_memoryless(g, s);
    os << "cert p2-memoryless\n";
    for (int st = 0; st < g.num_states(); ++st) {
      if (g.state(st).owner == s.owner) {
        os << "choose " << g.state(st).name << ' '
           << g.edge(s.choice[st]).id << "\n";
      }
    }
  } else {
    const auto& [ms, credit] = std::get<std::pair<MooreStrategy, CreditVector>>(c);
    validate_moore(g, ms);
    os << "cert p1-moore\n";
    os << "memory " << ms.memory_count << "\n";
    os << "initmem " << ms.initial_memory << "\n";
    for (int m = 0; m < ms.memory_count; ++m) {
      for (int st = 0; st < g.num_states(); ++st) {
        if (g.state(st).owner == ms.owner) {
          os << "next " << m << ' ' << g.state(st).name << ' '
             << g.edge(ms.next[m][st]).id << "\n";
        }
      }
    }
    for (int m = 0; m < ms.memory_count; ++m) {
      for (int st = 0; st < g.num_states(); ++st) {
        os << "update " << m << ' ' << g.state(st).name << ' '
           << ms.update[m][st] << "\n";
      }
    }
    if (!credit.v.empty()) {
      os << "credit";
      for (long long x : credit.v) os << ' ' << x;
      os << "\n";
    }
  }
  return os.str();
}

Certificate parse_certificate(const GameGraph& g, const std::string& text) {
  std::istringstream in(text);
  std::string line, kw;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw GameError("certificate line " + std::to_string(lineno) + ": " + msg);
  };
  std::string kind;
  MemorylessStrategy p2;
  p2.owner = Player::Two;
  p2.choice.assign(g.num_states(), -1);
  MooreStrategy p1;
  p1.owner = Player::One;
  CreditVector credit;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    if (!(ls >> kw)) continue;
    if (kind.empty()) {
      std::string what;
      if (kw != "cert" || !(ls >> what) ||
          (what != "p2-memoryless" && what != "p1-moore")) {
        fail("expected 'cert p2-memoryless|p1-moore'");
      }
      kind = what;
      continue;
    }
    if (kind == "p2-memoryless") {
      if (kw != "choose") fail("expected 'choose <state> <edge>'");
      std::string sname, eid;
      if (!(ls >> sname >> eid)) fail("expected 'choose <state> <edge>'");
      p2.choice[g.state_index(sname)] = g.edge_index(eid);
    } else {
      if (kw == "memory") {
        if (!(ls >> p1.memory_count) || p1.memory_count < 1) {
          fail("bad memory count");
        }
        p1.update.assign(p1.memory_count,
                         std::vector<int>(g.num_states(), 0));
        p1.next.assign(p1.memory_count,
                       std::vector<int>(g.num_states(), -1));
        for (int m = 0; m < p1.memory_count; ++m) {
          for (int st = 0; st < g.num_states(); ++st) {
            if (g.state(st).owner == Player::One) {
              p1.next[m][st] = g.out(st).front();
            }
          }
        }
      } else if (kw == "initmem") {
        if (!(ls >> p1.initial_memory)) fail("bad initmem");
      } else if (kw == "next") {
        int m;
        std::string sname, eid;
        if (!(ls >> m >> sname >> eid) || m < 0 || m >= p1.memory_count) {
          fail("bad next line");
        }
        p1.next[m][g.state_index(sname)] = g.edge_index(eid);
      } else if (kw == "update") {
        int m, m2;
        std::string sname;
        if (!(ls >> m >> sname >> m2) || m < 0 || m >= p1.memory_count ||
            m2 < 0 || m2 >= p1.memory_count) {
          fail("bad update line");
        }
        p1.update[m][g.state_index(sname)] = m2;
      } else if (kw == "credit") {
        long long x;
        while (ls >> x) credit.v.push_back(x);
        if (static_cast<int>(credit.v.size()) != g.dimension()) {
          fail("credit has wrong dimension");
        }
      } else {
        fail("unknown keyword '" + kw + "'");
      }
    }
  }
  if (kind.empty()) throw GameError("empty certificate");
  if (kind == "p2-memoryless") {
    for (int st = 0; st < g.num_states(); ++st) {
      if (g.state(st).owner == Player::Two && p2.choice[st] == -1) {
        throw GameError("certificate misses a choice at state '" +
                        g.state(st).name + "'");
      }
    }
    validate_memoryless(g, p2);
    return p2;
  }
  validate_moore(g, p1);
  if (credit.v.empty()) credit.v.assign(g.dimension(), 0);
  return std::make_pair(std::move(p1), std::move(credit));
}

}  // namespace mpg
