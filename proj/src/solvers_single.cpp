#include "mpg/solvers_single.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace mpg {

// Energy-lifting value iteration: f(s) is the least credit in `dim` that
// player 1 needs from s; values above n*W collapse to "losing" (represented
// as cap+1). The finite-valued states are exactly the MP-sup >= 0 (equally,
// MP-inf/energy) winning region in one dimension.
std::vector<int> solve_single_mp_sup(const GameGraph& g, int dim) {
  if (dim < 0 || dim >= g.dimension()) {
    throw GameError("bad dimension index");
  }
  const long long cap =
      static_cast<long long>(g.num_states()) * g.max_abs_weight(dim);
  const long long top = cap + 1;
  std::vector<long long> f(g.num_states(), 0);

  auto requirement = [&](int e) {
    long long fd = f[g.edge(e).dst];
    if (fd > cap) return top;
    long long r = fd - g.edge(e).weight[dim];
    if (r < 0) r = 0;
    return r > cap ? top : r;
  };
  auto lift = [&](int s) {
    bool p1 = g.state(s).owner == Player::One;
    long long best = p1 ? top : 0;
    for (int e : g.out(s)) {
      long long r = requirement(e);
      if (p1) {
        best = std::min(best, r);
      } else {
        best = std::max(best, r);
      }
    }
    return best;
  };

  std::vector<std::vector<int>> preds(g.num_states());
  for (int e = 0; e < g.num_edges(); ++e) {
    preds[g.edge(e).dst].push_back(g.edge(e).src);
  }
  std::deque<int> work;
  std::vector<char> queued(g.num_states(), 0);
  for (int s = 0; s < g.num_states(); ++s) {
    work.push_back(s);
    queued[s] = 1;
  }
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    queued[s] = 0;
    long long v = lift(s);
    if (v > f[s]) {
      f[s] = v;
      for (int p : preds[s]) {
        if (!queued[p]) {
          queued[p] = 1;
          work.push_back(p);
        }
      }
    }
  }
  std::vector<int> region;
  for (int s = 0; s < g.num_states(); ++s) {
    if (f[s] <= cap) region.push_back(s);
  }
  return region;
}

std::optional<Rat> max_mean_cycle(const GameGraph& g, int dim) {
  if (dim < 0 || dim >= g.dimension()) {
    throw GameError("bad dimension index");
  }
  if (scc_decomposition(g).size() != 1) {
    throw GameError("max_mean_cycle: input not strongly connected");
  }
  int n = g.num_states();
  bool has_cycle = n > 1;
  if (n == 1) {
    for (int e : g.out(0)) {
      if (g.edge(e).dst == 0) has_cycle = true;
    }
  }
  if (!has_cycle) return std::nullopt;

  // Karp: D[l][v] = max weight of a length-l walk from the source to v
  // (-infinity where unreachable), then max_v min_l (D[n][v]-D[l][v])/(n-l).
  constexpr long long kNegInf = std::numeric_limits<long long>::min() / 4;
  std::vector<std::vector<long long>> D(
      n + 1, std::vector<long long>(n, kNegInf));
  D[0][0] = 0;
  for (int l = 1; l <= n; ++l) {
    for (int e = 0; e < g.num_edges(); ++e) {
      int u = g.edge(e).src, v = g.edge(e).dst;
      if (D[l - 1][u] == kNegInf) continue;
      D[l][v] = std::max(D[l][v], D[l - 1][u] + g.edge(e).weight[dim]);
    }
  }
  std::optional<Rat> best;
  for (int v = 0; v < n; ++v) {
    if (D[n][v] == kNegInf) continue;
    std::optional<Rat> vmin;
    for (int l = 0; l < n; ++l) {
      if (D[l][v] == kNegInf) continue;
      Rat ratio(static_cast<long>(D[n][v] - D[l][v]),
                static_cast<long>(n - l));
      ratio.canonicalize();
      if (!vmin || ratio < *vmin) vmin = ratio;
    }
    if (vmin && (!best || *vmin > *best)) best = vmin;
  }
  return best;
}

}  // namespace mpg
