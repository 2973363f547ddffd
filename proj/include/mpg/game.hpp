#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mpg/rational.hpp"

namespace mpg {

using Weight = long long;
using WeightVector = std::vector<Weight>;

enum class Player { One = 1, Two = 2 };

struct State {
  std::string name;
  Player owner;
};

struct Edge {
  std::string id;
  int src;
  int dst;
  WeightVector weight;
};

// Active-dimension mask; empty means "all dimensions".
using DimMask = std::vector<int>;  // sorted list of 0-based dimension indices

class GameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite two-player arena with k-dimensional integer edge weights.
// Immutable after construction; parallel edges allowed, identified by edge id.
class GameGraph {
 public:
  GameGraph(int dimension, std::vector<State> states, std::vector<Edge> edges,
            int initial);

  int dimension() const { return dim_; }
  int num_states() const { return static_cast<int>(states_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int initial() const { return initial_; }
  const State& state(int i) const { return states_.at(i); }
  const Edge& edge(int i) const { return edges_.at(i); }
  const std::vector<State>& states() const { return states_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // Outgoing edge indices in declaration order.
  const std::vector<int>& out(int state) const { return out_.at(state); }

  int state_index(std::string_view name) const;  // throws GameError
  int edge_index(std::string_view id) const;     // throws GameError
  std::optional<int> find_state(std::string_view name) const;
  std::optional<int> find_edge(std::string_view id) const;

  // Largest absolute weight over all edges and dimensions (0 if none).
  Weight max_abs_weight() const;
  Weight max_abs_weight(int dim) const;

 private:
  int dim_;
  int initial_;
  std::vector<State> states_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
};

GameGraph parse_game(std::istream& in);
GameGraph parse_game(const std::string& text);
std::string serialize_game(const GameGraph& g);

// Per-dimension rescaling w_i -> b_i*w_i - a_i for threshold a_i/b_i, so that
// "objective at threshold v" becomes "objective at threshold 0".
GameGraph shift_weights(const GameGraph& g, const std::vector<Rat>& thresholds);

// Induced subgame on T (state indices). Every state of T must keep an
// outgoing edge inside T; throws GameError naming the offending state.
// State names and edge ids are preserved.
GameGraph restrict(const GameGraph& g, const std::vector<int>& T);

// States from which `player` can force reaching T. Returns a sorted set.
std::vector<int> attractor(const GameGraph& g, Player player,
                           const std::vector<int>& T);

// Maximal SCCs in reverse topological order (every successor SCC earlier).
std::vector<std::vector<int>> scc_decomposition(const GameGraph& g);

struct PlayPrefix {
  std::vector<int> states;  // nonempty
  std::vector<int> edges;   // |edges| = |states| - 1
};

// Validates the prefix against g (throws GameError) and sums edge weights.
WeightVector energy_level(const GameGraph& g, const PlayPrefix& p);

struct LassoPlay {
  PlayPrefix stem;  // stem.states.back() == loop.states.front()
  PlayPrefix loop;  // closed: first state == last state, >= 1 edge
};

std::vector<Rat> lasso_mean_payoff(const GameGraph& g, const LassoPlay& p);

enum class ObjectiveKind {
  EnergyUnknownCredit,
  FiniteMemoryMP,
  MPSup,
  MPInf,
  MPInfSup,
};

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::EnergyUnknownCredit;
  std::set<int> inf_dims;  // 0-based
  std::set<int> sup_dims;  // 0-based
  std::vector<Rat> thresholds;

  // Drops sup dimensions already constrained by inf (liminf <= limsup) and
  // validates dimension indices against k.
  void normalize(int k);
};

// Helpers shared by solvers.
std::vector<int> all_dims(int k);
bool sorted_contains(const std::vector<int>& v, int x);

}  // namespace mpg
