#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mpg/game.hpp"
#include "mpg/multicycle.hpp"

namespace mpg {

struct MemorylessStrategy {
  Player owner = Player::Two;
  // For each owner state index, the chosen outgoing edge index; -1 elsewhere.
  std::vector<int> choice;
};

struct MooreStrategy {
  Player owner = Player::One;
  int memory_count = 1;
  int initial_memory = 0;
  // update[m][s] -> m' (total on M x S).
  std::vector<std::vector<int>> update;
  // next[m][s] -> edge index for owner states, -1 elsewhere.
  std::vector<std::vector<int>> next;
};

struct CreditVector {
  std::vector<long long> v;  // componentwise >= 0
};

using Certificate = std::variant<MemorylessStrategy,
                                 std::pair<MooreStrategy, CreditVector>>;

// One-player graph obtained by fixing lambda's choices; states of the
// strategy owner keep only the chosen edge and are handed to the opponent's
// view as player-1 states (all-player-1 graph when owner is player 2).
GameGraph fix_strategy(const GameGraph& g, const MemorylessStrategy& lambda);

// Reachable product of memory x states; strategy owner's moves are fixed.
struct ProductGraph {
  struct Node {
    int memory;
    int state;
  };
  std::vector<Node> nodes;
  // succ[n] = (successor node, traversed edge index).
  std::vector<std::vector<std::pair<int, int>>> succ;
  int initial = 0;
};

ProductGraph product_graph(const GameGraph& g, const MooreStrategy& strat,
                           int s0);
ProductGraph product_graph(const GameGraph& g,
                           const MemorylessStrategy& strat, int s0);

// True iff lambda_2 refutes player 1 from s0 for the given objective kind.
// Energy/FiniteMemoryMP: no reachable nonnegative circuit in G_lambda.
// MPInf: no reachable SCC with a nonnegative multi-cycle on inf_dims.
// MPInfSup: refutes MeanPayoffInf on I+{l} for some l in J (plain MPInf when
// J is empty). Throws GameError for MPSup.
bool verify_p2_certificate(const GameGraph& g, const MemorylessStrategy& l2,
                           int s0, const ObjectiveSpec& objective);

// If every reachable product cycle is componentwise nonnegative, the minimal
// sufficient credit max(0, -(min reachable prefix sum)) per dimension;
// otherwise nullopt.
std::optional<CreditVector> score_p1_finite_strategy(const GameGraph& g,
                                                     const MooreStrategy& strat,
                                                     int s0);

// For criterion "decrementing any component yields a refuting play": the
// prefix realizing the minimum reachable sum in dimension `dim` under strat.
std::optional<PlayPrefix> argmin_prefix(const GameGraph& g,
                                        const MooreStrategy& strat, int s0,
                                        int dim);

struct ExtractOptions {
  long long cap = -1;                   // default 2*n*W
  std::size_t max_arena = 4'000'000;    // reachable capped-arena node guard
};

// Capped safety game on S x {0..C}^k (saturating adds; any negative
// component loses). On a player-1 win, the arena-positional strategy is
// folded into a Moore machine whose memory tracks the capped energy vector.
// Throws GameError when the reachable arena exceeds options.max_arena.
std::optional<std::pair<MooreStrategy, CreditVector>> extract_finite_strategy(
    const GameGraph& g, int s0, const ExtractOptions& options = {});

struct EpsilonSchedule {
  Rat alpha;
  long long Z = 0;  // >= (|S|+2)*W/alpha
  struct Round {
    std::vector<int> cycle;      // edge indices, closed at the anchor state
    long long repetitions = 0;   // Z * m_j
    std::vector<int> connector;  // edge path to the next round's anchor
  };
  std::vector<Round> rounds;
  long long warmup = 0;  // N >= 2*M*|S|*W/alpha, M = steps per full round
  int start_state = 0;
};

EpsilonSchedule pump_schedule_from_witness(const GameGraph& scc,
                                           const MultiCycleWitness& witness,
                                           const Rat& alpha);

struct ScheduleTrace {
  long long steps = 0;
  // Per dimension, the minimum of (prefix sum / steps) over steps > warmup.
  std::vector<Rat> post_warmup_min_average;
  bool bound_met = false;  // all post-warmup averages >= -2*alpha
};

ScheduleTrace simulate_schedule(const GameGraph& g,
                                const EpsilonSchedule& sched,
                                long long horizon);

struct InterleaveTrace {
  struct Phase {
    int dim = 0;
    Rat alpha;
    long long boundary_step = 0;
    std::vector<Rat> prefix_average;  // per dimension, at the boundary
    bool bound_met = false;           // dimension-dim average >= -2*alpha
  };
  std::vector<Phase> phases;
  bool timed_out = false;
};

// Round-robin alpha-halving interleaving of per-dimension MP-sup strategies
// on a one-player game. Each lambda1[i] must win MP-sup in dimension i from
// every state (checked via solve_single_mp_sup).
InterleaveTrace simulate_interleaved_sup(
    const GameGraph& g, const std::vector<MemorylessStrategy>& lambda1,
    int s0, int phases, long long max_steps);

std::string serialize_certificate(const GameGraph& g, const Certificate& c);
Certificate parse_certificate(const GameGraph& g, const std::string& text);

}  // namespace mpg
