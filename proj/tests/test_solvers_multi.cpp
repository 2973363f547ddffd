#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "mpg/generators.hpp"
#include "mpg/multicycle.hpp"
#include "mpg/solvers.hpp"
#include "mpg/solvers_single.hpp"

using namespace mpg;

namespace {

// Oracle for the limsup conjunction: s wins iff under every memoryless
// player-2 choice some component reachable from s has, per dimension, a
// cycle of nonnegative mean.
std::vector<int> mp_sup_oracle(const GameGraph& g) {
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
              internal.push_back({e.id, order[e.src], order[e.dst], e.weight});
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
  std::vector<int> region;
  for (int s = 0; s < g.num_states(); ++s) {
    if (wins[s]) region.push_back(s);
  }
  return region;
}

}  // namespace

TEST_CASE("limsup region solver on the figure games") {
  GameGraph g = shift_weights(fixture("fig3"), {Rat(2), Rat(2)});
  SolveReport r = solve_mp_sup_region(g);
  CHECK(r.winning_region == std::vector<int>({0, 1}));
  CHECK(r.yes);

  GameGraph over = shift_weights(fixture("fig3"), {Rat(3), Rat(2)});
  CHECK(solve_mp_sup_region(over).winning_region.empty());

  GameGraph neg = parse_game(
      "mwg 1\ndim 2\nstate a 1\nstate b 2\n"
      "edge ab a b -1 0\nedge ba b a -1 1\ninit a\n");
  CHECK(solve_mp_sup_region(neg).winning_region.empty());
}

TEST_CASE("limsup region equals the enumeration oracle") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    GameGraph g = random_game(6, 2, 2, 0.5, seed);
    CHECK(solve_mp_sup_region(g).winning_region == mp_sup_oracle(g));
  }
}

TEST_CASE("one-player liminf decisions") {
  GameGraph g = shift_weights(fixture("fig3"), {Rat(1), Rat(1)});
  CHECK(solve_one_player_mp_inf(g, 0));
  GameGraph gg = shift_weights(fixture("fig3"), {Rat(2), Rat(2)});
  CHECK(!solve_one_player_mp_inf(gg, 0));

  GameGraph bad_loop = parse_game(
      "mwg 1\ndim 2\nstate s 1\nedge l s s -1 1\ninit s\n");
  CHECK(!solve_one_player_mp_inf(bad_loop, 0));
  GameGraph zero_loop = parse_game(
      "mwg 1\ndim 2\nstate s 1\nedge l s s 0 0\ninit s\n");
  CHECK(solve_one_player_mp_inf(zero_loop, 0));

  GameGraph two_player = fixture("fig1");
  CHECK_THROWS_AS((void)solve_one_player_mp_inf(two_player, 0), GameError);
}

TEST_CASE("unknown-initial-credit decisions") {
  GameGraph fig1 = fixture("fig1");
  SolveReport r = solve_energy_unknown_credit(fig1, fig1.state_index("s0"));
  CHECK(r.yes);
  CHECK(r.stats.strategies_enumerated == 2);

  GameGraph fig3s = shift_weights(fixture("fig3"), {Rat(1), Rat(1)});
  SolveReport n = solve_energy_unknown_credit(fig3s, 0);
  CHECK(!n.yes);
  REQUIRE(n.p2_certificate.has_value());
  ObjectiveSpec energy;
  energy.kind = ObjectiveKind::EnergyUnknownCredit;
  CHECK(verify_p2_certificate(fig3s, *n.p2_certificate, 0, energy));

  CnfFormula phi;
  phi.num_vars = 1;
  phi.clauses.push_back({1, 1, 1});
  GameGraph sat_game = from_3sat(phi);
  SolveReport sr = solve_energy_unknown_credit(sat_game, sat_game.initial());
  CHECK(!sr.yes);
  REQUIRE(sr.p2_certificate.has_value());
  CHECK(verify_p2_certificate(sat_game, *sr.p2_certificate,
                              sat_game.initial(), energy));

  EnumOptions with_cert;
  with_cert.extract_p1_cert = true;
  SolveReport yc =
      solve_energy_unknown_credit(fig1, fig1.state_index("s0"), with_cert);
  REQUIRE(yc.p1_certificate.has_value());
  auto scored = score_p1_finite_strategy(fig1, yc.p1_certificate->first,
                                         fig1.state_index("s0"));
  REQUIRE(scored.has_value());
}

TEST_CASE("capped-arena path agrees with enumeration") {
  GameGraph fig1 = fixture("fig1");
  CHECK(solve_finite_memory_mp(fig1, fig1.state_index("s0")).yes);
  GameGraph fig3s = shift_weights(fixture("fig3"), {Rat(1), Rat(1)});
  CHECK(!solve_finite_memory_mp(fig3s, 0).yes);

  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GameGraph g = random_game(5, 2, 2, 0.5, seed);
    for (int s = 0; s < g.num_states(); ++s) {
      CHECK(solve_energy_unknown_credit(g, s).yes ==
            solve_finite_memory_mp(g, s).yes);
    }
  }
}

TEST_CASE("two-player liminf decisions") {
  GameGraph fig3s = shift_weights(fixture("fig3"), {Rat(1), Rat(1)});
  CHECK(solve_mp_inf(fig3s, 0).yes);

  GameGraph trap = parse_game(
      "mwg 1\ndim 2\nstate a 2\nstate b 1\n"
      "edge ab a b -1 1\nedge lb b b -1 1\nedge ba b a -1 1\ninit a\n");
  SolveReport r = solve_mp_inf(trap, 0);
  CHECK(!r.yes);
  REQUIRE(r.p2_certificate.has_value());
  ObjectiveSpec inf;
  inf.kind = ObjectiveKind::MPInf;
  inf.inf_dims = {0, 1};
  CHECK(verify_p2_certificate(trap, *r.p2_certificate, 0, inf));
}

TEST_CASE("mixed inf/sup objective") {
  GameGraph fig3s = shift_weights(fixture("fig3"), {Rat(1), Rat(1)});
  CHECK(solve_mp_infsup(fig3s, {0}, {1}, 0).yes);
  // Delegations.
  GameGraph fig3ss = shift_weights(fixture("fig3"), {Rat(1), Rat(1)});
  CHECK(solve_mp_infsup(fig3ss, {}, {0, 1}, 0).yes ==
        sorted_contains(solve_mp_sup_region(fig3ss).winning_region, 0));
  CHECK(solve_mp_infsup(fig3ss, {0, 1}, {}, 0).yes ==
        solve_mp_inf(fig3ss, 0).yes);
  CHECK_THROWS_AS((void)solve_mp_infsup(fig3ss, {0}, {0}, 0), GameError);
}

TEST_CASE("single-sup reduction equivalence on random games") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    GameGraph g = random_game(5, 2, 2, 0.5, seed);
    for (int l = 0; l < 2; ++l) {
      std::vector<int> I{1 - l};
      for (int s = 0; s < g.num_states(); ++s) {
        DimMask both{0, 1};
        CHECK(solve_mp_infsup(g, I, {l}, s).yes ==
              solve_mp_inf(g, s, both).yes);
      }
    }
  }
}

TEST_CASE("objective strength containments on random games") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    GameGraph g = random_game(5, 2, 2, 0.5, seed);
    std::vector<int> sup_region = solve_mp_sup_region(g).winning_region;
    for (int s = 0; s < g.num_states(); ++s) {
      bool energy = solve_energy_unknown_credit(g, s).yes;
      bool inf = solve_mp_inf(g, s).yes;
      bool infsup01 = solve_mp_infsup(g, {0}, {1}, s).yes;
      bool infsup10 = solve_mp_infsup(g, {1}, {0}, s).yes;
      bool sup = sorted_contains(sup_region, s);
      if (energy) CHECK(inf);
      if (inf) {
        CHECK(infsup01);
        CHECK(infsup10);
      }
      if (infsup01) CHECK(sup);
      if (infsup10) CHECK(sup);
    }
  }
}

TEST_CASE("memoryless player-1 synthesis") {
  GameGraph zero = parse_game(
      "mwg 1\ndim 1\nstate s 1\nedge loop s s 0\ninit s\n");
  auto got = solve_memoryless_player1(zero, 0);
  REQUIRE(got.has_value());
  CHECK(got->choice[0] == 0);

  GameGraph fig3s = shift_weights(fixture("fig3"), {Rat(1), Rat(1)});
  CHECK(!solve_memoryless_player1(fig3s, 0));

  // Two disjoint chains: the canonical winnable reduction instance.
  Digraph d;
  d.n = 4;
  d.edges = {{0, 1}, {2, 3}};
  GameGraph game = from_disjoint_paths(d, 0, 1, 2, 3);
  auto strat = solve_memoryless_player1(game, game.initial());
  REQUIRE(strat.has_value());

  // A mandatory shared vertex kills both paths.
  Digraph shared;
  shared.n = 5;
  shared.edges = {{0, 4}, {4, 1}, {2, 4}, {4, 3}};
  GameGraph blocked = from_disjoint_paths(shared, 0, 1, 2, 3);
  CHECK(!solve_memoryless_player1(blocked, blocked.initial()));
}

TEST_CASE("enumeration guard") {
  // 21 player-2 states with two choices each: 2^21 > 2^20 candidates.
  std::string text = "mwg 1\ndim 1\n";
  for (int i = 0; i < 21; ++i) text += "state s" + std::to_string(i) + " 2\n";
  for (int i = 0; i < 21; ++i) {
    std::string s = "s" + std::to_string(i);
    std::string t = "s" + std::to_string((i + 1) % 21);
    text += "edge a" + std::to_string(i) + " " + s + " " + t + " 0\n";
    text += "edge b" + std::to_string(i) + " " + s + " " + s + " 0\n";
  }
  text += "init s0\n";
  GameGraph g = parse_game(text);
  CHECK(count_memoryless_strategies(g, Player::Two) ==
        std::uint64_t{1} << 21);
  CHECK_THROWS_AS((void)solve_energy_unknown_credit(g, 0), GameError);

  // The same guard with a lowered limit, and --force lifting it.
  GameGraph small = fixture("fig1");
  EnumOptions strict;
  strict.max_strategies = 1;
  CHECK_THROWS_AS((void)solve_energy_unknown_credit(small, 0, strict),
                  GameError);
  strict.force = true;
  CHECK(solve_energy_unknown_credit(small, 0, strict).yes);
}

TEST_CASE("strategy enumeration helper") {
  GameGraph fig1 = fixture("fig1");
  CHECK(count_memoryless_strategies(fig1, Player::Two) == 2);
  CHECK(count_memoryless_strategies(fig1, Player::One) == 2);
  std::uint64_t seen = for_each_memoryless_strategy(
      fig1, Player::Two, [&](const MemorylessStrategy& l2) {
        CHECK(l2.choice[fig1.state_index("s1")] == -1);
        CHECK(fig1.edge(l2.choice[fig1.state_index("s0")]).src ==
              fig1.state_index("s0"));
        return true;
      });
  CHECK(seen == 2);
  std::uint64_t stopped = for_each_memoryless_strategy(
      fig1, Player::Two, [](const MemorylessStrategy&) { return false; });
  CHECK(stopped == 1);
}
