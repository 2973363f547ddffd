#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpg/rational.hpp"

namespace mpg::lp {

enum class Rel { Le, Eq, Ge };

struct Constraint {
  std::vector<std::pair<int, Rat>> coeffs;  // (variable index, coefficient)
  Rel rel = Rel::Le;
  Rat rhs = 0;
};

// Linear constraint system over free rational variables. Nonnegativity, when
// wanted, is expressed as an ordinary >= 0 constraint.
struct System {
  std::vector<std::string> vars;
  std::vector<Constraint> rows;

  int add_var(std::string name);
  void add(std::vector<std::pair<int, Rat>> coeffs, Rel rel, Rat rhs);
};

enum class Verdict { Feasible, Infeasible };

struct FeasibilityResult {
  Verdict verdict = Verdict::Infeasible;
  // Per-variable values when feasible.
  std::vector<Rat> assignment;
  // Per-row Farkas multipliers when infeasible: >= 0 on Ge rows, <= 0 on Le
  // rows, unconstrained on Eq rows; the combined coefficient vector is zero
  // while the combined rhs is positive (0 >= positive contradiction).
  std::vector<Rat> farkas;
};

// Exact simplex feasibility (Bland's rule). Every result is re-verified
// before being returned; verification failures are counted in stats().
FeasibilityResult solve_feasibility(const System& sys);

// Exactly the variables v such that some feasible solution has v > 0.
// Requires a feasible system (throws std::invalid_argument otherwise).
// If `witnesses` is non-null it receives, for each reported variable, one
// feasible assignment with that variable positive (shared points reused).
std::vector<int> support_vars(const System& sys,
                              std::vector<std::vector<Rat>>* witnesses = nullptr);

bool check_assignment(const System& sys, const std::vector<Rat>& assignment);
bool check_farkas(const System& sys, const std::vector<Rat>& farkas);

struct Stats {
  std::uint64_t solves = 0;
  std::uint64_t feasible = 0;
  std::uint64_t infeasible = 0;
  std::uint64_t verify_failures = 0;
  std::uint64_t big_kernel_fallbacks = 0;
};

Stats stats();
void reset_stats();

}  // namespace mpg::lp
