// Acceptance harness: twelve independent criteria, one pass/fail line each.
// Optional argv[1] is the path to the command-line binary; when given, the
// CLI-level variants of the first two criteria run as well.

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mpg/certificates.hpp"
#include "mpg/game.hpp"
#include "mpg/generators.hpp"
#include "mpg/lp.hpp"
#include "mpg/multicycle.hpp"
#include "mpg/solvers.hpp"
#include "mpg/solvers_single.hpp"

using namespace mpg;

namespace {

std::string g_cli;  // path to the CLI binary, may be empty

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct Failure {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

// First stdout line of a CLI invocation, or nullopt when no CLI was given.
std::optional<std::string> cli_first_line(const std::string& args) {
  if (g_cli.empty()) return std::nullopt;
  std::string cmd = g_cli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw Failure{"popen failed for: " + cmd};
  char buf[256];
  std::string line;
  if (fgets(buf, sizeof buf, pipe)) {
    line = buf;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
      line.pop_back();
    }
  }
  pclose(pipe);
  return line;
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = "acceptance_" + name;
  std::ofstream out(path);
  out << text;
  return path;
}

MooreStrategy alternating_machine(const GameGraph& g, const std::string& first,
                                  const std::string& second) {
  MooreStrategy ms;
  ms.owner = Player::One;
  ms.memory_count = 2;
  ms.initial_memory = 0;
  ms.update.assign(2, std::vector<int>(g.num_states(), 0));
  ms.next.assign(2, std::vector<int>(g.num_states(), -1));
  int s1 = g.state_index("s1"), s2 = g.state_index("s2");
  for (int m = 0; m < 2; ++m) {
    for (int s = 0; s < g.num_states(); ++s) ms.update[m][s] = m;
    ms.update[m][s2] = 1 - m;
    ms.next[m][s1] = g.edge_index("e3");
  }
  ms.next[0][s2] = g.edge_index(first);
  ms.next[1][s2] = g.edge_index(second);
  return ms;
}

// ---------------------------------------------------------------- criteria

void criterion1() {
  GameGraph g = fixture("fig1");
  int s0 = g.state_index("s0");
  expect(solve_energy_unknown_credit(g, s0).yes, "library verdict not YES");
  if (auto line = cli_first_line("solve --obj energy " +
                                 write_temp("fig1.mwg", serialize_game(g)) +
                                 " --from s0")) {
    expect(*line == "YES", "CLI verdict was '" + *line + "'");
  }
  auto v_a = score_p1_finite_strategy(g, alternating_machine(g, "e5", "e4"),
                                      s0);
  auto v_b = score_p1_finite_strategy(g, alternating_machine(g, "e4", "e5"),
                                      s0);
  expect(v_a && v_a->v == std::vector<long long>({2, 1}),
         "first alternating machine not scored (2,1)");
  expect(v_b && v_b->v == std::vector<long long>({3, 0}),
         "second alternating machine not scored (3,0)");
  MemorylessStrategy left;
  left.owner = Player::Two;
  left.choice.assign(g.num_states(), -1);
  left.choice[s0] = g.edge_index("e1");
  ObjectiveSpec energy;
  energy.kind = ObjectiveKind::EnergyUnknownCredit;
  expect(!verify_p2_certificate(g, left, s0, energy),
         "always-left wrongly accepted as refutation");
}

void criterion2() {
  GameGraph g = fixture("fig3");
  std::string path = write_temp("fig3.mwg", serialize_game(g));
  auto check = [&](const std::string& args, const std::string& want) {
    if (auto line = cli_first_line(args + " " + path)) {
      expect(*line == want, args + " printed '" + *line + "'");
    }
  };
  expect(!solve_finite_memory_mp(shift_weights(g, {Rat(1), Rat(1)}), 0).yes,
         "finite-memory at (1,1) not NO");
  expect(solve_mp_inf(shift_weights(g, {Rat(1), Rat(1)}), 0).yes,
         "liminf at (1,1) not YES");
  expect(solve_mp_sup_region(shift_weights(g, {Rat(2), Rat(2)})).yes,
         "limsup at (2,2) not YES");
  expect(!solve_mp_sup_region(shift_weights(g, {Rat(3), Rat(2)})).yes,
         "limsup at (3,2) not NO");
  check("solve --obj mp-fin --threshold 1,1", "NO");
  check("solve --obj mp-inf --threshold 1,1", "YES");
  check("solve --obj mp-sup --threshold 2,2", "YES");
  check("solve --obj mp-sup --threshold 3,2", "NO");
}

void criterion3() {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    CnfFormula phi = random_cnf(5, 6, seed);
    GameGraph g = from_3sat(phi);
    bool energy_yes = solve_energy_unknown_credit(g, g.initial()).yes;
    expect(energy_yes == !brute_force_sat(phi),
           "formula seed " + std::to_string(seed) + " disagrees");
  }
}

void criterion4() {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GameGraph g = random_game(5, 2, 2, 0.5, seed);
    for (int s = 0; s < g.num_states(); ++s) {
      bool a = solve_energy_unknown_credit(g, s).yes;
      bool b = solve_finite_memory_mp(g, s).yes;
      expect(a == b, "seed " + std::to_string(seed) + " state " +
                         std::to_string(s) + ": enum " + (a ? "YES" : "NO") +
                         " vs capped " + (b ? "YES" : "NO"));
    }
  }
}

void criterion5() {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GameGraph g = random_game(5, 2, 2, 0.5, seed);
    int l = static_cast<int>(seed % 2);
    std::vector<int> I{1 - l};
    for (int s = 0; s < g.num_states(); ++s) {
      bool infsup = solve_mp_infsup(g, I, {l}, s).yes;
      bool inf = solve_mp_inf(g, s, {0, 1}).yes;
      expect(infsup == inf, "seed " + std::to_string(seed) + " state " +
                                std::to_string(s) + " split");
    }
  }
}

void criterion6() {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GameGraph g = random_game(5, 2, 2, 0.5, seed);
    std::vector<int> sup_region = solve_mp_sup_region(g).winning_region;
    for (int s = 0; s < g.num_states(); ++s) {
      bool energy = solve_energy_unknown_credit(g, s).yes;
      bool inf = solve_mp_inf(g, s).yes;
      bool is01 = solve_mp_infsup(g, {0}, {1}, s).yes;
      bool is10 = solve_mp_infsup(g, {1}, {0}, s).yes;
      bool sup = sorted_contains(sup_region, s);
      std::string at = "seed " + std::to_string(seed) + " state " +
                       std::to_string(s);
      expect(!energy || inf, at + ": energy outside liminf");
      expect(!inf || (is01 && is10), at + ": liminf outside mixed");
      expect((!is01 && !is10) || sup, at + ": mixed outside limsup");
    }
  }
}

void criterion7() {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GameGraph g = random_game(6, 2, 2, 0.5, seed);
    std::vector<char> wins(g.num_states(), 1);
    for_each_memoryless_strategy(
        g, Player::Two, [&](const MemorylessStrategy& l2) {
          GameGraph fixed = fix_strategy(g, l2);
          auto sccs = scc_decomposition(fixed);
          std::vector<int> comp_of(fixed.num_states(), -1);
          for (std::size_t c = 0; c < sccs.size(); ++c) {
            for (int s : sccs[c]) comp_of[s] = static_cast<int>(c);
          }
          std::vector<char> good(sccs.size(), 0);
          for (std::size_t c = 0; c < sccs.size(); ++c) {
            std::vector<Edge> internal;
            std::vector<int> order(fixed.num_states(), -1);
            for (std::size_t i = 0; i < sccs[c].size(); ++i) {
              order[sccs[c][i]] = static_cast<int>(i);
            }
            for (const Edge& e : fixed.edges()) {
              if (comp_of[e.src] == static_cast<int>(c) &&
                  comp_of[e.dst] == static_cast<int>(c)) {
                internal.push_back(
                    {e.id, order[e.src], order[e.dst], e.weight});
              }
            }
            if (internal.empty()) continue;
            std::vector<State> states;
            for (int s : sccs[c]) states.push_back(fixed.state(s));
            GameGraph sub(fixed.dimension(), std::move(states),
                          std::move(internal), 0);
            bool all_dims = true;
            for (int d = 0; d < sub.dimension(); ++d) {
              auto mmc = max_mean_cycle(sub, d);
              if (!mmc || *mmc < Rat(0)) all_dims = false;
            }
            good[c] = all_dims;
          }
          for (std::size_t c = 0; c < sccs.size(); ++c) {
            if (good[c]) continue;
            for (int s : sccs[c]) {
              for (int e : fixed.out(s)) {
                if (good[comp_of[fixed.edge(e).dst]]) good[c] = 1;
              }
            }
          }
          for (int s = 0; s < g.num_states(); ++s) {
            if (!good[comp_of[s]]) wins[s] = 0;
          }
          return true;
        });
    std::vector<int> oracle;
    for (int s = 0; s < g.num_states(); ++s) {
      if (wins[s]) oracle.push_back(s);
    }
    expect(solve_mp_sup_region(g).winning_region == oracle,
           "seed " + std::to_string(seed) + " region mismatch");
  }
}

// Exhaustive zero-circuit cross-validation. Structures: simple digraphs
// (no parallel edges) on <= 3 vertices, <= 5 edges, every vertex with an
// outgoing edge; weights in {-1,0,1}, 1 or 2 dimensions.
//
// Oracle: a connected closed walk is an Euler circuit of a balanced
// multigraph, and every balanced multigraph decomposes into simple directed
// cycles whose union is its support. So a zero circuit exists iff some
// vertex-connected set T of simple cycles admits multiplicities y_t >= 1
// with sum_t y_t * weight(t) = 0 per active dimension (a rational solution
// scales to an integer one). With at most two dimensions, that feasibility
// question is decided exactly by two-generator cone membership using
// integer cross products -- no simplex involved.
struct Structure {
  int n;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> cycles;            // edge index lists
  std::vector<std::vector<int>> cycle_vertices;    // vertex sets
  std::vector<std::vector<int>> connected_subsets; // cycle index lists
};

void enumerate_cycles(Structure& st) {
  const int m = static_cast<int>(st.edges.size());
  auto edge_between = [&](int u, int v) {
    for (int e = 0; e < m; ++e) {
      if (st.edges[e] == std::make_pair(u, v)) return e;
    }
    return -1;
  };
  for (int v = 0; v < st.n; ++v) {
    int e = edge_between(v, v);
    if (e >= 0) {
      st.cycles.push_back({e});
      st.cycle_vertices.push_back({v});
    }
  }
  for (int u = 0; u < st.n; ++u) {
    for (int v = u + 1; v < st.n; ++v) {
      int a = edge_between(u, v), b = edge_between(v, u);
      if (a >= 0 && b >= 0) {
        st.cycles.push_back({a, b});
        st.cycle_vertices.push_back({u, v});
      }
    }
  }
  if (st.n == 3) {
    for (auto [x, y] : {std::make_pair(1, 2), std::make_pair(2, 1)}) {
      int a = edge_between(0, x), b = edge_between(x, y),
          c = edge_between(y, 0);
      if (a >= 0 && b >= 0 && c >= 0) {
        st.cycles.push_back({a, b, c});
        st.cycle_vertices.push_back({0, x, y});
      }
    }
  }
  const int nc = static_cast<int>(st.cycles.size());
  for (int mask = 1; mask < (1 << nc); ++mask) {
    std::vector<int> comp(st.n);
    std::iota(comp.begin(), comp.end(), 0);
    auto root = [&](int v) {
      while (comp[v] != v) v = comp[v] = comp[comp[v]];
      return v;
    };
    std::vector<int> chosen;
    for (int t = 0; t < nc; ++t) {
      if (!(mask & (1 << t))) continue;
      chosen.push_back(t);
      for (int v : st.cycle_vertices[t]) {
        comp[root(st.cycle_vertices[t][0])] = root(v);
      }
    }
    int home = root(st.cycle_vertices[chosen.front()][0]);
    bool connected = true;
    for (int t : chosen) {
      connected = connected && root(st.cycle_vertices[t][0]) == home;
    }
    if (connected) st.connected_subsets.push_back(std::move(chosen));
  }
}

// Does z >= 0 with sum_t z_t v_t = b exist, for vectors of dimension k<=2?
bool in_cone(const std::vector<std::array<long long, 2>>& v,
             const std::array<long long, 2>& b, int k) {
  auto zero = [&](const std::array<long long, 2>& x) {
    return x[0] == 0 && (k < 2 || x[1] == 0);
  };
  if (zero(b)) return true;
  if (k == 1) {
    for (const auto& u : v) {
      if ((u[0] > 0) == (b[0] > 0) && u[0] != 0) return true;
    }
    return false;
  }
  auto cross = [](const std::array<long long, 2>& p,
                  const std::array<long long, 2>& q) {
    return p[0] * q[1] - p[1] * q[0];
  };
  auto dot = [](const std::array<long long, 2>& p,
                const std::array<long long, 2>& q) {
    return p[0] * q[0] + p[1] * q[1];
  };
  for (const auto& u : v) {
    if (!zero(u) && cross(u, b) == 0 && dot(u, b) > 0) return true;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const auto &u = v[i], &w = v[j];
      long long det = cross(u, w);
      if (det != 0) {
        // b = l1*u + l2*w with l1 = cross(b,w)/det, l2 = cross(u,b)/det.
        if (cross(b, w) * det >= 0 && cross(u, b) * det >= 0) return true;
      } else if (!zero(u) && !zero(w) && dot(u, w) < 0 &&
                 cross(u, b) == 0) {
        // Opposite parallel generators span the whole line through b.
        return true;
      }
    }
  }
  return false;
}

void criterion8() {
  // Barrier sanity first: the cycle-sum relaxation is feasible, the exact
  // circuit question is not.
  GameGraph barrier = fixture("barrier");
  expect(nonneg_multicycle(barrier).has_value(),
         "barrier cycle-sum system should be feasible");
  expect(!zero_circuit_exists(barrier).exists,
         "barrier must have no zero circuit");

  std::vector<Structure> structures;
  for (int n = 1; n <= 3; ++n) {
    std::vector<std::pair<int, int>> all;
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) all.emplace_back(u, v);
    }
    const int m = static_cast<int>(all.size());
    for (int mask = 1; mask < (1 << m); ++mask) {
      if (__builtin_popcount(mask) > 5) continue;
      std::vector<char> has_out(n, 0);
      Structure st;
      st.n = n;
      for (int e = 0; e < m; ++e) {
        if (mask & (1 << e)) {
          st.edges.push_back(all[e]);
          has_out[all[e].first] = 1;
        }
      }
      bool total_arena = true;
      for (int v = 0; v < n; ++v) total_arena = total_arena && has_out[v];
      if (!total_arena) continue;
      enumerate_cycles(st);
      structures.push_back(std::move(st));
    }
  }

  long long graphs = 0, positives = 0;
  for (const Structure& st : structures) {
    const int m = static_cast<int>(st.edges.size());
    std::vector<State> states;
    for (int v = 0; v < st.n; ++v) {
      states.push_back({"s" + std::to_string(v), Player::One});
    }
    for (int k = 1; k <= 2; ++k) {
      std::vector<int> w(m * k, -1);  // odometer over {-1,0,1}^(m*k)
      while (true) {
        std::vector<Edge> edges;
        for (int e = 0; e < m; ++e) {
          WeightVector wv(k);
          for (int d = 0; d < k; ++d) wv[d] = w[e * k + d];
          edges.push_back({"e" + std::to_string(e), st.edges[e].first,
                           st.edges[e].second, std::move(wv)});
        }
        GameGraph g(k, std::vector<State>(states), std::move(edges), 0);
        // Per-cycle weight vectors under the current weighting.
        std::vector<std::array<long long, 2>> cw(st.cycles.size(),
                                                 {0, 0});
        for (std::size_t t = 0; t < st.cycles.size(); ++t) {
          for (int e : st.cycles[t]) {
            for (int d = 0; d < k; ++d) cw[t][d] += w[e * k + d];
          }
        }
        bool oracle = false;
        std::vector<std::array<long long, 2>> gens;
        for (const auto& subset : st.connected_subsets) {
          // y >= 1 substituted as y = 1 + z, z >= 0.
          std::array<long long, 2> b{0, 0};
          gens.clear();
          for (int t : subset) {
            b[0] -= cw[t][0];
            b[1] -= cw[t][1];
            gens.push_back(cw[t]);
          }
          if (in_cone(gens, b, k)) {
            oracle = true;
            break;
          }
        }
        ZeroCircuitResult got = zero_circuit_exists(g, {}, 0);
        ++graphs;
        positives += got.exists;
        if (got.exists != oracle) {
          std::ostringstream os;
          os << "disagreement (" << (got.exists ? "yes" : "no")
             << " vs oracle " << (oracle ? "yes" : "no") << ") on:\n"
             << serialize_game(g);
          throw Failure{os.str()};
        }
        int i = 0;
        while (i < m * k) {
          if (++w[i] <= 1) break;
          w[i] = -1;
          ++i;
        }
        if (i == m * k) break;
      }
    }
  }
  std::cerr << "  criterion 8 family: " << graphs << " graphs, " << positives
            << " with a zero circuit\n";
}

void criterion9() {
  lp::Stats st = lp::stats();
  expect(st.solves > 0, "no linear systems were solved at all");
  expect(st.verify_failures == 0,
         std::to_string(st.verify_failures) + " self-check failures");
  std::cerr << "  lp: " << st.solves << " solves, " << st.feasible
            << " feasible, " << st.infeasible << " infeasible, "
            << st.big_kernel_fallbacks << " big-number fallbacks\n";
}

void criterion10() {
  GameGraph g = shift_weights(fixture("fig3"), {Rat(1), Rat(1)});
  auto witness = nonneg_multicycle(g);
  expect(witness.has_value(), "no cycle witness on the shifted game");
  for (auto [alpha, bound] :
       {std::make_pair(Rat(1, 2), Rat(-1)),
        std::make_pair(Rat(1, 4), Rat(-1, 2))}) {
    EpsilonSchedule sched = pump_schedule_from_witness(g, *witness, alpha);
    ScheduleTrace t = simulate_schedule(g, sched, 10000);
    for (int d = 0; d < 2; ++d) {
      expect(t.post_warmup_min_average[d] >= bound,
             "post-warmup average dim " + std::to_string(d + 1) +
                 " fell below the bound at alpha " + rat_to_string(alpha));
    }
  }
}

void criterion11() {
  GameGraph g = shift_weights(fixture("fig3"), {Rat(2), Rat(2)});
  int sa = g.state_index("sa"), sb = g.state_index("sb");
  MemorylessStrategy stay_a, stay_b;
  stay_a.owner = Player::One;
  stay_a.choice.assign(2, -1);
  stay_a.choice[sa] = g.edge_index("loop_a");
  stay_a.choice[sb] = g.edge_index("b_to_a");
  stay_b = stay_a;
  stay_b.choice[sa] = g.edge_index("a_to_b");
  stay_b.choice[sb] = g.edge_index("loop_b");
  InterleaveTrace t =
      simulate_interleaved_sup(g, {stay_a, stay_b}, sa, 6, 1000000);
  expect(!t.timed_out, "six phases did not fit in 10^6 steps");
  expect(t.phases.size() == 6, "phase count mismatch");
  for (const auto& ph : t.phases) {
    expect(ph.bound_met, "phase boundary at step " +
                             std::to_string(ph.boundary_step) +
                             " missed the -2*alpha bound");
  }
}

void criterion12() {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Digraph d = random_digraph(8, 3, seed);
    GameGraph g = from_disjoint_paths(d, 0, 1, 2, 3);
    bool strat = solve_memoryless_player1(g, g.initial()).has_value();
    bool oracle = brute_force_disjoint_paths(d, 0, 1, 2, 3);
    expect(strat == oracle, "seed " + std::to_string(seed) + ": reduction " +
                                (strat ? "YES" : "NO") + " vs oracle " +
                                (oracle ? "YES" : "NO"));
  }
}

struct Criterion {
  int id;
  const char* what;
  void (*run)();
  double budget;  // seconds; 0 = unbudgeted
};

const Criterion kCriteria[] = {
    {1, "parallel-edge game: YES, machine scores (2,1)/(3,0), always-left "
        "refuted",
     criterion1, 1.0},
    {2, "two-loop game verdicts at thresholds (1,1)/(2,2)/(3,2)", criterion2,
     1.0},
    {3, "50 random 3-CNF formulas: energy verdict equals UNSAT", criterion3,
     60.0},
    {4, "100 random games: enumeration and capped-arena solvers agree",
     criterion4, 120.0},
    {5, "50 random games: single-sup objective equals liminf on merged "
        "dimensions",
     criterion5, 0.0},
    {6, "100 random games: energy within liminf within mixed within limsup",
     criterion6, 0.0},
    {7, "50 random games: region solver equals strategy-enumeration oracle",
     criterion7, 0.0},
    {8, "zero-circuit decision equals closed-walk enumeration on the "
        "exhaustive tiny family; barrier separates",
     criterion8, 0.0},
    {9, "every linear-system result self-verified", criterion9, 0.0},
    {10, "pumping schedule averages within -2*alpha after warmup",
     criterion10, 0.0},
    {11, "six interleaving phases within 10^6 steps, all boundaries within "
         "-2*alpha",
     criterion11, 0.0},
    {12, "30 random digraphs: reduction strategy exists iff disjoint paths "
         "exist",
     criterion12, 0.0},
};

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];
  lp::reset_stats();
  int failures = 0;
  for (const Criterion& c : kCriteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::string verdict = "PASS";
    std::string detail;
    try {
      c.run();
    } catch (const Failure& f) {
      verdict = "FAIL";
      detail = f.what;
    } catch (const std::exception& e) {
      verdict = "FAIL";
      detail = std::string("exception: ") + e.what();
    }
    double dt = seconds_since(t0);
    if (verdict == "PASS" && c.budget > 0 && dt > c.budget) {
      verdict = "FAIL";
      detail = "over time budget of " + std::to_string(c.budget) + "s";
    }
    if (verdict == "FAIL") ++failures;
    std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", verdict.c_str(), c.id,
                c.what, dt, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
