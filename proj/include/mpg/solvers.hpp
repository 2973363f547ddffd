#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mpg/certificates.hpp"
#include "mpg/game.hpp"

namespace mpg {

struct EnumOptions {
  std::uint64_t max_strategies = std::uint64_t{1} << 20;
  bool force = false;            // lift the enumeration guard
  bool extract_p1_cert = false;  // on YES, also run extract_finite_strategy
};

struct SolveStats {
  std::uint64_t strategies_enumerated = 0;
};

struct SolveReport {
  bool yes = false;
  // Winning region (sorted original-state indices) for region solvers.
  std::vector<int> winning_region;
  std::optional<MemorylessStrategy> p2_certificate;
  std::optional<std::pair<MooreStrategy, CreditVector>> p1_certificate;
  std::string method;
  SolveStats stats;
};

// Algorithm "iterative removal": repeatedly strips, per active dimension,
// the states losing the one-dimensional MP-sup subgame until stable.
SolveReport solve_mp_sup_region(const GameGraph& g, const DimMask& dims = {});

// One-player (all states player 1): true iff some SCC reachable from s0 has
// a nonnegative multi-cycle on the active dimensions.
bool solve_one_player_mp_inf(const GameGraph& g, int s0,
                             const DimMask& dims = {});

// Unknown-initial-credit energy game, coNP enumeration: YES iff every
// player-2 memoryless strategy leaves a reachable nonnegative circuit.
SolveReport solve_energy_unknown_credit(const GameGraph& g, int s0,
                                        const EnumOptions& options = {});

// Independent path for the same decision via the capped safety arena.
SolveReport solve_finite_memory_mp(const GameGraph& g, int s0,
                                   const ExtractOptions& options = {});

// Two-player MP-inf via player-2 memoryless enumeration.
SolveReport solve_mp_inf(const GameGraph& g, int s0, const DimMask& dims = {},
                         const EnumOptions& options = {});

// Mixed objective MeanPayoffInfSup(I, J); iterative removal over l in J of
// the player-2 region for MeanPayoffInf on I+{l}. Delegates to
// solve_mp_sup_region when I is empty and to solve_mp_inf when J is empty.
// I and J are 0-based dimension sets with J already disjoint from I.
SolveReport solve_mp_infsup(const GameGraph& g, const std::vector<int>& I,
                            const std::vector<int>& J, int s0,
                            const EnumOptions& options = {});

// Player-1 memoryless winner for unknown initial credit: enumerate player-1
// edge choices; accept iff every cycle reachable from s0 in the fixed graph
// is nonnegative in every dimension.
std::optional<MemorylessStrategy> solve_memoryless_player1(
    const GameGraph& g, int s0, const EnumOptions& options = {});

// Number of memoryless strategies for `player` (product of out-degrees);
// saturates at 2^63-1.
std::uint64_t count_memoryless_strategies(const GameGraph& g, Player player);

// Enumeration helper: calls fn for each memoryless strategy of `player` in
// mixed-radix declaration order until fn returns false. Returns the number
// of strategies visited.
std::uint64_t for_each_memoryless_strategy(
    const GameGraph& g, Player player,
    const std::function<bool(const MemorylessStrategy&)>& fn);

}  // namespace mpg
