#include "mpg/multicycle.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "mpg/lp.hpp"

namespace mpg {

namespace {

DimMask resolve(const GameGraph& g, const DimMask& dims) {
  if (dims.empty()) return all_dims(g.dimension());
  DimMask d = dims;
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  for (int i : d) {
    if (i < 0 || i >= g.dimension()) throw GameError("bad dimension index");
  }
  return d;
}

// SCCs of the subgraph spanned by `edges` (indices into g). Returns, per
// component with at least one edge, the vertex set and the edges whose
// endpoints both lie in it.
struct EdgeComponent {
  std::vector<int> verts;
  std::vector<int> edges;
};

std::vector<EdgeComponent> edge_sccs(const GameGraph& g,
                                     const std::vector<int>& edges) {
  std::vector<int> verts;
  for (int e : edges) {
    verts.push_back(g.edge(e).src);
    verts.push_back(g.edge(e).dst);
  }
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  std::vector<int> local(g.num_states(), -1);
  for (std::size_t i = 0; i < verts.size(); ++i) local[verts[i]] = i;
  int n = static_cast<int>(verts.size());
  std::vector<std::vector<int>> adj(n);
  for (int e : edges) {
    if (g.edge(e).src != g.edge(e).dst) {
      adj[local[g.edge(e).src]].push_back(local[g.edge(e).dst]);
    }
  }
  // Iterative Tarjan over the local subgraph.
  std::vector<int> index(n, -1), low(n, 0), stk, comp_of(n, -1);
  std::vector<char> on_stk(n, 0);
  int counter = 0, ncomp = 0;
  struct Frame {
    int v;
    std::size_t ei;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stk.push_back(root);
    on_stk[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.ei < adj[f.v].size()) {
        int w = adj[f.v][f.ei++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stk.push_back(w);
          on_stk[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stk[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) {
          low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        }
        if (low[v] == index[v]) {
          int w;
          do {
            w = stk.back();
            stk.pop_back();
            on_stk[w] = 0;
            comp_of[w] = ncomp;
          } while (w != v);
          ++ncomp;
        }
      }
    }
  }
  std::vector<EdgeComponent> comps(ncomp);
  for (int i = 0; i < n; ++i) comps[comp_of[i]].verts.push_back(verts[i]);
  for (int e : edges) {
    int cs = comp_of[local[g.edge(e).src]];
    int cd = comp_of[local[g.edge(e).dst]];
    if (cs == cd) comps[cs].edges.push_back(e);
  }
  std::vector<EdgeComponent> out;
  for (auto& c : comps) {
    if (!c.edges.empty()) out.push_back(std::move(c));
  }
  return out;
}

bool masked_weights_equal(const GameGraph& g, int e1, int e2,
                          const DimMask& dims) {
  for (int d : dims) {
    if (g.edge(e1).weight[d] != g.edge(e2).weight[d]) return false;
  }
  return true;
}

// LP variable classes for a component: parallel/duplicate columns merged.
struct EdgeClass {
  std::vector<int> members;  // edge indices
  bool self_loop = false;
  bool omnipresent = false;  // self-loop class with a member at every vertex
  int src = -1, dst = -1;    // for non-self classes (and pinned self classes)
};

std::vector<EdgeClass> build_classes(const GameGraph& g,
                                     const EdgeComponent& comp,
                                     const DimMask& dims) {
  std::vector<EdgeClass> classes;
  // Non-self: key (src, dst, masked weights).
  std::map<std::tuple<int, int, std::vector<Weight>>, int> ns_key;
  // Self-loops grouped first by masked weight, then split per vertex unless
  // the weight group covers every component vertex.
  std::map<std::vector<Weight>, std::map<int, std::vector<int>>> self_groups;
  auto masked = [&](int e) {
    std::vector<Weight> w;
    w.reserve(dims.size());
    for (int d : dims) w.push_back(g.edge(e).weight[d]);
    return w;
  };
  for (int e : comp.edges) {
    if (g.edge(e).src == g.edge(e).dst) {
      self_groups[masked(e)][g.edge(e).src].push_back(e);
    } else {
      auto key = std::make_tuple(g.edge(e).src, g.edge(e).dst, masked(e));
      auto it = ns_key.find(key);
      if (it == ns_key.end()) {
        ns_key.emplace(key, static_cast<int>(classes.size()));
        EdgeClass c;
        c.members = {e};
        c.src = g.edge(e).src;
        c.dst = g.edge(e).dst;
        classes.push_back(std::move(c));
      } else {
        classes[it->second].members.push_back(e);
      }
    }
  }
  for (auto& [w, by_vertex] : self_groups) {
    if (by_vertex.size() == comp.verts.size()) {
      EdgeClass c;
      c.self_loop = true;
      c.omnipresent = true;
      for (auto& [v, es] : by_vertex) {
        c.members.insert(c.members.end(), es.begin(), es.end());
      }
      classes.push_back(std::move(c));
    } else {
      for (auto& [v, es] : by_vertex) {
        EdgeClass c;
        c.self_loop = true;
        c.src = c.dst = v;
        c.members = es;
        classes.push_back(std::move(c));
      }
    }
  }
  return classes;
}

// Equality LP over classes: flow conservation, per-dimension weight = 0,
// total >= 1, all variables >= 0.
lp::System zero_lp(const GameGraph& g, const std::vector<EdgeClass>& classes,
                   const std::vector<int>& verts, const DimMask& dims) {
  lp::System sys;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    sys.add_var("x" + std::to_string(c));
  }
  std::vector<int> local(g.num_states(), -1);
  for (std::size_t i = 0; i < verts.size(); ++i) local[verts[i]] = i;
  std::vector<std::vector<std::pair<int, Rat>>> flow(verts.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].self_loop) continue;
    flow[local[classes[c].src]].push_back({static_cast<int>(c), Rat(1)});
    flow[local[classes[c].dst]].push_back({static_cast<int>(c), Rat(-1)});
  }
  for (auto& row : flow) {
    if (!row.empty()) sys.add(std::move(row), lp::Rel::Eq, 0);
  }
  for (int d : dims) {
    std::vector<std::pair<int, Rat>> row;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      Weight w = g.edge(classes[c].members.front()).weight[d];
      if (w != 0) {
        row.push_back({static_cast<int>(c), Rat(static_cast<long>(w))});
      }
    }
    sys.add(std::move(row), lp::Rel::Eq, 0);
  }
  std::vector<std::pair<int, Rat>> total;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    total.push_back({static_cast<int>(c), Rat(1)});
    sys.add({{static_cast<int>(c), Rat(1)}}, lp::Rel::Ge, 0);
  }
  sys.add(std::move(total), lp::Rel::Ge, 1);
  return sys;
}

// Eulerian closed walk over an integer multigraph given as (edge index,
// multiplicity) pairs; all edges lie in one connected component. Returns the
// edge sequence.
std::vector<int> euler_walk(const GameGraph& g,
                            const std::vector<std::pair<int, long long>>& flow) {
  std::map<int, std::vector<std::pair<int, long long>>> out;  // vertex -> rem
  int start = -1;
  for (auto& [e, m] : flow) {
    out[g.edge(e).src].push_back({e, m});
    if (start == -1) start = g.edge(e).src;
  }
  // Hierholzer with multiplicity counters.
  std::vector<int> circuit;
  std::vector<int> stack_v{start};
  std::vector<int> stack_e;
  while (!stack_v.empty()) {
    int v = stack_v.back();
    auto& lst = out[v];
    while (!lst.empty() && lst.back().second == 0) lst.pop_back();
    if (lst.empty()) {
      stack_v.pop_back();
      if (!stack_e.empty()) {
        circuit.push_back(stack_e.back());
        stack_e.pop_back();
      }
    } else {
      auto& [e, m] = lst.back();
      --m;
      stack_e.push_back(e);
      stack_v.push_back(g.edge(e).dst);
    }
  }
  std::reverse(circuit.begin(), circuit.end());
  return circuit;
}

struct ZcCtx {
  const GameGraph& g;
  const DimMask& dims;
  std::size_t bound;
};

bool zc_component(const ZcCtx& ctx, const EdgeComponent& comp,
                  std::optional<CircuitWitness>* witness);

bool zc_edges(const ZcCtx& ctx, const std::vector<int>& edges,
              std::optional<CircuitWitness>* witness) {
  for (const EdgeComponent& comp : edge_sccs(ctx.g, edges)) {
    if (zc_component(ctx, comp, witness)) return true;
  }
  return false;
}

// Scales a rational class assignment to integers and expands it onto member
// edges; pinned self classes keep their vertex, floating classes are placed
// at `anchor` (-1 = member's own vertex is fine for every class).
std::vector<std::pair<int, long long>> integer_flow(
    const GameGraph& g, const std::vector<EdgeClass>& classes,
    const std::vector<Rat>& x, int anchor) {
  mpz_class lcm_den = 1;
  for (const Rat& v : x) {
    mpz_class d = v.get_den();
    mpz_class gcd;
    mpz_gcd(gcd.get_mpz_t(), lcm_den.get_mpz_t(), d.get_mpz_t());
    lcm_den = lcm_den / gcd * d;
  }
  std::vector<std::pair<int, long long>> flow;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    Rat scaled = x[c] * Rat(lcm_den);
    if (sgn(scaled) <= 0) continue;
    if (!scaled.get_num().fits_slong_p()) return {};  // witness too large
    long long m = scaled.get_num().get_si();
    int e = classes[c].members.front();
    if (classes[c].self_loop && classes[c].omnipresent && anchor != -1) {
      for (int cand : classes[c].members) {
        if (g.edge(cand).src == anchor) {
          e = cand;
          break;
        }
      }
    }
    flow.push_back({e, m});
  }
  return flow;
}

bool zc_component(const ZcCtx& ctx, const EdgeComponent& comp,
                  std::optional<CircuitWitness>* witness) {
  const GameGraph& g = ctx.g;
  std::vector<EdgeClass> classes = build_classes(g, comp, ctx.dims);
  lp::System sys = zero_lp(g, classes, comp.verts, ctx.dims);
  lp::FeasibilityResult fr = lp::solve_feasibility(sys);
  if (fr.verdict == lp::Verdict::Infeasible) return false;

  std::vector<std::vector<Rat>> points;
  std::vector<int> support = lp::support_vars(sys, &points);
  std::vector<char> in_support(classes.size(), 0);
  for (int v : support) in_support[v] = 1;

  // Partition the support.
  std::vector<int> ns_support;       // non-self classes
  std::vector<int> pinned_vertices;  // vertices of per-vertex self classes
  bool any_self_support = false;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (!in_support[c]) continue;
    if (classes[c].self_loop) {
      any_self_support = true;
      if (!classes[c].omnipresent) pinned_vertices.push_back(classes[c].src);
    } else {
      ns_support.push_back(static_cast<int>(c));
    }
  }

  if (ns_support.empty()) {
    // All-zero-weight closed loops must sit at a single vertex; try each.
    for (int v : comp.verts) {
      std::vector<int> loops;
      for (int e : comp.edges) {
        if (g.edge(e).src == v && g.edge(e).dst == v) loops.push_back(e);
      }
      if (loops.empty()) continue;
      EdgeComponent sub;
      sub.verts = {v};
      sub.edges = loops;
      std::vector<EdgeClass> lc = build_classes(g, sub, ctx.dims);
      lp::System ls = zero_lp(g, lc, sub.verts, ctx.dims);
      lp::FeasibilityResult lr = lp::solve_feasibility(ls);
      if (lr.verdict == lp::Verdict::Feasible) {
        if (witness) {
          auto flow = integer_flow(g, lc, lr.assignment, -1);
          std::size_t len = 0;
          for (auto& [e, m] : flow) len += static_cast<std::size_t>(m);
          if (!flow.empty() && len <= ctx.bound) {
            CircuitWitness w;
            for (auto& [e, m] : flow) {
              for (long long i = 0; i < m; ++i) w.edges.push_back(e);
            }
            *witness = std::move(w);
          }
        }
        return true;
      }
    }
    return false;
  }

  // Connectivity: the non-self support edges must form one strongly
  // connected piece covering their endpoints plus every pinned vertex.
  std::vector<int> core_edges;
  for (int c : ns_support) {
    core_edges.insert(core_edges.end(), classes[c].members.begin(),
                      classes[c].members.end());
  }
  std::vector<EdgeComponent> core = edge_sccs(g, core_edges);
  bool connected = core.size() == 1 &&
                   core[0].edges.size() == core_edges.size();
  if (connected) {
    std::vector<char> in_core(g.num_states(), 0);
    for (int v : core[0].verts) in_core[v] = 1;
    for (int v : pinned_vertices) {
      if (!in_core[v]) connected = false;
    }
  }
  if (connected) {
    if (witness) {
      // Combined solution: sum of retained probe points supports every
      // supported class at once.
      std::vector<Rat> xs(classes.size(), Rat(0));
      for (const auto& p : points) {
        for (std::size_t c = 0; c < classes.size(); ++c) xs[c] += p[c];
      }
      int anchor = core[0].verts.front();
      auto flow = integer_flow(g, classes, xs, anchor);
      std::size_t len = 0;
      for (auto& [e, m] : flow) len += static_cast<std::size_t>(m);
      if (!flow.empty() && len <= ctx.bound) {
        CircuitWitness w;
        w.edges = euler_walk(g, flow);
        *witness = std::move(w);
      }
    }
    return true;
  }

  // Recurse on the supported subgraph (strictly fewer edges: at least one
  // class is unsupported, otherwise the component itself would be
  // connected).
  std::vector<int> sub_edges;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (in_support[c]) {
      sub_edges.insert(sub_edges.end(), classes[c].members.begin(),
                       classes[c].members.end());
    }
  }
  if (sub_edges.size() >= comp.edges.size()) {
    throw std::logic_error("zero-circuit recursion did not shrink");
  }
  return zc_edges(ctx, sub_edges, witness);
}

}  // namespace

std::optional<MultiCycleWitness> nonneg_multicycle(const GameGraph& g,
                                                   const DimMask& dims_in) {
  DimMask dims = resolve(g, dims_in);
  auto sccs = scc_decomposition(g);
  if (sccs.size() != 1) {
    throw GameError("nonneg_multicycle: input not strongly connected");
  }
  lp::System sys;
  for (int e = 0; e < g.num_edges(); ++e) sys.add_var(g.edge(e).id);
  std::vector<std::vector<std::pair<int, Rat>>> flow(g.num_states());
  for (int e = 0; e < g.num_edges(); ++e) {
    if (g.edge(e).src != g.edge(e).dst) {
      flow[g.edge(e).src].push_back({e, Rat(1)});
      flow[g.edge(e).dst].push_back({e, Rat(-1)});
    }
    sys.add({{e, Rat(1)}}, lp::Rel::Ge, 0);
  }
  for (auto& row : flow) {
    if (!row.empty()) sys.add(std::move(row), lp::Rel::Eq, 0);
  }
  for (int d : dims) {
    std::vector<std::pair<int, Rat>> row;
    for (int e = 0; e < g.num_edges(); ++e) {
      if (g.edge(e).weight[d] != 0) {
        row.push_back({e, Rat(static_cast<long>(g.edge(e).weight[d]))});
      }
    }
    sys.add(std::move(row), lp::Rel::Ge, 0);
  }
  std::vector<std::pair<int, Rat>> total;
  for (int e = 0; e < g.num_edges(); ++e) total.push_back({e, Rat(1)});
  sys.add(std::move(total), lp::Rel::Ge, 1);

  lp::FeasibilityResult fr = lp::solve_feasibility(sys);
  if (fr.verdict == lp::Verdict::Infeasible) return std::nullopt;

  // Scale to an integer balanced flow and peel off simple cycles, taking the
  // bottleneck multiplicity each time so the loop is linear in edge count.
  mpz_class lcm_den = 1;
  for (const Rat& v : fr.assignment) {
    mpz_class d = v.get_den();
    mpz_class gcd;
    mpz_gcd(gcd.get_mpz_t(), lcm_den.get_mpz_t(), d.get_mpz_t());
    lcm_den = lcm_den / gcd * d;
  }
  std::vector<mpz_class> m(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    Rat scaled = fr.assignment[e] * Rat(lcm_den);
    m[e] = scaled.get_num();
  }
  MultiCycleWitness w;
  Rat denom = Rat(lcm_den);
  while (true) {
    int start_edge = -1;
    for (int e = 0; e < g.num_edges(); ++e) {
      if (sgn(m[e]) > 0) {
        start_edge = e;
        break;
      }
    }
    if (start_edge == -1) break;
    // Walk forward along positive-flow edges until a vertex repeats.
    std::vector<int> path_edges;
    std::vector<int> seen_at(g.num_states(), -1);
    int v = g.edge(start_edge).src;
    seen_at[v] = 0;
    while (true) {
      int next_e = -1;
      for (int e : g.out(v)) {
        if (sgn(m[e]) > 0) {
          next_e = e;
          break;
        }
      }
      if (next_e == -1) {
        throw std::logic_error("balanced flow has a dead end");
      }
      path_edges.push_back(next_e);
      v = g.edge(next_e).dst;
      if (seen_at[v] != -1) break;
      seen_at[v] = static_cast<int>(path_edges.size());
    }
    // Extract the cycle portion starting at the repeated vertex.
    std::vector<int> cycle(path_edges.begin() + seen_at[v], path_edges.end());
    mpz_class t = m[cycle[0]];
    for (int e : cycle) t = std::min(t, m[e]);
    for (int e : cycle) m[e] -= t;
    MultiCycleWitness::Item item;
    item.edges = std::move(cycle);
    item.factor = Rat(t) / denom;
    w.cycles.push_back(std::move(item));
  }
  return w;
}

ZeroCircuitResult zero_circuit_exists(const GameGraph& g,
                                      const DimMask& dims_in,
                                      std::size_t witness_length_bound) {
  DimMask dims = resolve(g, dims_in);
  std::vector<int> edges(g.num_edges());
  std::iota(edges.begin(), edges.end(), 0);
  ZcCtx ctx{g, dims, witness_length_bound};
  ZeroCircuitResult res;
  std::optional<CircuitWitness> w;
  res.exists = zc_edges(ctx, edges, &w);
  res.witness = std::move(w);
  return res;
}

bool nonneg_circuit_reachable(const GameGraph& g, int s0,
                              const DimMask& dims_in) {
  DimMask dims = resolve(g, dims_in);
  if (s0 < 0 || s0 >= g.num_states()) throw GameError("unknown state");
  std::vector<Edge> edges = g.edges();
  for (int s = 0; s < g.num_states(); ++s) {
    for (int d : dims) {
      WeightVector w(g.dimension(), 0);
      w[d] = -1;
      edges.push_back({"zdec_" + std::to_string(d) + "_" + std::to_string(s),
                       s, s, std::move(w)});
    }
  }
  GameGraph aug(g.dimension(), g.states(), std::move(edges), s0);
  // Forward closure from s0.
  std::vector<char> reach(aug.num_states(), 0);
  std::vector<int> queue{s0};
  reach[s0] = 1;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    for (int e : aug.out(queue[qi])) {
      int d = aug.edge(e).dst;
      if (!reach[d]) {
        reach[d] = 1;
        queue.push_back(d);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  GameGraph sub = restrict(aug, queue);
  return zero_circuit_exists(sub, dims, 0).exists;
}

bool reachable_scc_has_nonneg_multicycle(const GameGraph& g, int s0,
                                         const DimMask& dims_in) {
  DimMask dims = resolve(g, dims_in);
  if (s0 < 0 || s0 >= g.num_states()) throw GameError("unknown state");
  std::vector<char> reach(g.num_states(), 0);
  std::vector<int> queue{s0};
  reach[s0] = 1;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    for (int e : g.out(queue[qi])) {
      int d = g.edge(e).dst;
      if (!reach[d]) {
        reach[d] = 1;
        queue.push_back(d);
      }
    }
  }
  std::vector<int> all_edges;
  for (int e = 0; e < g.num_edges(); ++e) {
    if (reach[g.edge(e).src] && reach[g.edge(e).dst]) all_edges.push_back(e);
  }
  for (const EdgeComponent& comp : edge_sccs(g, all_edges)) {
    // Build the induced subgame on the component (every component vertex
    // keeps an outgoing edge inside it because the component has >= 1 edge
    // and is strongly connected).
    std::vector<int> local(g.num_states(), -1);
    std::vector<State> states;
    for (int v : comp.verts) {
      local[v] = static_cast<int>(states.size());
      states.push_back(g.state(v));
    }
    std::vector<Edge> edges;
    for (int e : comp.edges) {
      edges.push_back({g.edge(e).id, local[g.edge(e).src],
                       local[g.edge(e).dst], g.edge(e).weight});
    }
    GameGraph sub(g.dimension(), std::move(states), std::move(edges), 0);
    if (nonneg_multicycle(sub, dims)) return true;
  }
  return false;
}

bool verify_multicycle_witness(const GameGraph& g, const MultiCycleWitness& w,
                               const DimMask& dims_in) {
  DimMask dims = resolve(g, dims_in);
  if (w.cycles.empty()) return false;
  auto sccs = scc_decomposition(g);
  std::vector<int> scc_of(g.num_states(), -1);
  for (std::size_t i = 0; i < sccs.size(); ++i) {
    for (int s : sccs[i]) scc_of[s] = static_cast<int>(i);
  }
  int home = -1;
  Rat total(0);
  std::vector<Rat> sum(dims.size(), Rat(0));
  for (const auto& item : w.cycles) {
    if (item.edges.empty() || sgn(item.factor) <= 0) return false;
    std::vector<char> visited(g.num_states(), 0);
    for (std::size_t i = 0; i < item.edges.size(); ++i) {
      const Edge& e = g.edge(item.edges[i]);
      const Edge& next = g.edge(item.edges[(i + 1) % item.edges.size()]);
      if (e.dst != next.src) return false;  // not closed/connected
      if (visited[e.src]) return false;     // not simple
      visited[e.src] = 1;
      if (home == -1) home = scc_of[e.src];
      if (scc_of[e.src] != home) return false;
      for (std::size_t d = 0; d < dims.size(); ++d) {
        sum[d] += item.factor * Rat(static_cast<long>(e.weight[dims[d]]));
      }
    }
    total += item.factor * Rat(static_cast<long>(item.edges.size()));
  }
  if (sgn(total) <= 0) return false;
  for (const Rat& s : sum) {
    if (sgn(s) < 0) return false;
  }
  return true;
}

bool verify_circuit_witness(const GameGraph& g, const CircuitWitness& w,
                            bool require_zero, const DimMask& dims_in) {
  DimMask dims = resolve(g, dims_in);
  if (w.edges.empty()) return false;
  for (std::size_t i = 0; i < w.edges.size(); ++i) {
    const Edge& e = g.edge(w.edges[i]);
    const Edge& next = g.edge(w.edges[(i + 1) % w.edges.size()]);
    if (e.dst != next.src) return false;
  }
  for (int d : dims) {
    Weight sum = 0;
    for (int ei : w.edges) sum += g.edge(ei).weight[d];
    if (require_zero ? sum != 0 : sum < 0) return false;
  }
  return true;
}

}  // namespace mpg
