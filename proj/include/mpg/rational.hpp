#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace mpg {

// Exact rational arithmetic. All game-theoretic decisions (LP feasibility,
// cycle means, thresholds) are made over Rat; no floating point is used
// anywhere on a decision path.
using Rat = mpq_class;

// Parses "a" or "a/b" with optional sign; throws std::invalid_argument on
// malformed input or zero denominator.
Rat parse_rat(const std::string& text);

std::string rat_to_string(const Rat& r);

// Parses a comma-separated list of rationals ("1,1/2,-3").
std::vector<Rat> parse_rat_list(const std::string& text);

inline bool rat_is_integer(const Rat& r) { return r.get_den() == 1; }

}  // namespace mpg
