#pragma once

#include <optional>
#include <vector>

#include "mpg/game.hpp"

namespace mpg {

// Rational-weighted multiset of simple cycles (edge-index sequences) whose
// weighted sum is componentwise nonnegative. Cycles may be disconnected.
struct MultiCycleWitness {
  struct Item {
    std::vector<int> edges;  // simple closed cycle, by edge index
    Rat factor;              // > 0
  };
  std::vector<Item> cycles;
};

// Connected closed walk, not necessarily simple, by edge index.
struct CircuitWitness {
  std::vector<int> edges;
};

inline constexpr std::size_t kDefaultWitnessLengthBound = 4096;

// Cycle-space LP on a strongly connected graph view: witness iff
// {flow conservation; x >= 0; sum x_e w_i(e) >= 0 for all active i;
//  sum x_e >= 1} is feasible. Throws GameError if g is not strongly
// connected. Ownership is ignored.
std::optional<MultiCycleWitness> nonneg_multicycle(const GameGraph& g,
                                                   const DimMask& dims = {});

struct ZeroCircuitResult {
  bool exists = false;
  std::optional<CircuitWitness> witness;  // emitted when length <= bound
};

// True iff some connected closed walk has weight exactly 0 in every active
// dimension. Per SCC: equality LP; on feasibility, support connectivity
// check; recursion on the support subgraph otherwise.
ZeroCircuitResult zero_circuit_exists(
    const GameGraph& g, const DimMask& dims = {},
    std::size_t witness_length_bound = kDefaultWitnessLengthBound);

// True iff a componentwise-nonnegative circuit is reachable from s0.
// Implemented by adding one decrement self-loop per active dimension to
// every state and testing zero_circuit_exists on the part reachable from s0.
bool nonneg_circuit_reachable(const GameGraph& g, int s0,
                              const DimMask& dims = {});

// True iff some SCC reachable from s0 (ownership ignored) carries a
// nonnegative multi-cycle on the active dimensions.
bool reachable_scc_has_nonneg_multicycle(const GameGraph& g, int s0,
                                         const DimMask& dims = {});

bool verify_multicycle_witness(const GameGraph& g,
                               const MultiCycleWitness& w,
                               const DimMask& dims = {});
bool verify_circuit_witness(const GameGraph& g, const CircuitWitness& w,
                            bool require_zero, const DimMask& dims = {});

}  // namespace mpg
