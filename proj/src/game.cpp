#include "mpg/game.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <unordered_map>

namespace mpg {

namespace {

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
      return false;
    }
  }
  return true;
}

}  // namespace

GameGraph::GameGraph(int dimension, std::vector<State> states,
                     std::vector<Edge> edges, int initial)
    : dim_(dimension),
      initial_(initial),
      states_(std::move(states)),
      edges_(std::move(edges)) {
  if (dim_ < 1) throw GameError("dimension must be >= 1");
  if (states_.empty()) throw GameError("game needs at least one state");
  if (initial_ < 0 || initial_ >= num_states()) {
    throw GameError("initial state out of range");
  }
  out_.assign(states_.size(), {});
  std::unordered_map<std::string_view, int> edge_ids;
  for (int i = 0; i < num_edges(); ++i) {
    const Edge& e = edges_[i];
    if (e.src < 0 || e.src >= num_states() || e.dst < 0 ||
        e.dst >= num_states()) {
      throw GameError("edge '" + e.id + "' references unknown state");
    }
    if (static_cast<int>(e.weight.size()) != dim_) {
      throw GameError("edge '" + e.id + "' has wrong weight dimension");
    }
    if (!edge_ids.emplace(e.id, i).second) {
      throw GameError("duplicate edge id '" + e.id + "'");
    }
    out_[e.src].push_back(i);
  }
  for (int s = 0; s < num_states(); ++s) {
    if (out_[s].empty()) {
      throw GameError("sink state '" + states_[s].name +
                      "' has no outgoing edge");
    }
  }
}

int GameGraph::state_index(std::string_view name) const {
  if (auto i = find_state(name)) return *i;
  throw GameError("unknown state '" + std::string(name) + "'");
}

int GameGraph::edge_index(std::string_view id) const {
  if (auto i = find_edge(id)) return *i;
  throw GameError("unknown edge '" + std::string(id) + "'");
}

std::optional<int> GameGraph::find_state(std::string_view name) const {
  for (int i = 0; i < num_states(); ++i) {
    if (states_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<int> GameGraph::find_edge(std::string_view id) const {
  for (int i = 0; i < num_edges(); ++i) {
    if (edges_[i].id == id) return i;
  }
  return std::nullopt;
}

Weight GameGraph::max_abs_weight() const {
  Weight w = 0;
  for (const Edge& e : edges_) {
    for (Weight x : e.weight) w = std::max(w, x < 0 ? -x : x);
  }
  return w;
}

Weight GameGraph::max_abs_weight(int dim) const {
  Weight w = 0;
  for (const Edge& e : edges_) {
    Weight x = e.weight.at(dim);
    w = std::max(w, x < 0 ? -x : x);
  }
  return w;
}

GameGraph parse_game(std::istream& in) {
  int dim = -1;
  bool saw_header = false;
  std::vector<State> states;
  std::vector<Edge> edges;
  std::unordered_map<std::string, int> state_idx;
  std::string init_name;
  std::string line;
  int lineno = 0;

  auto fail = [&](const std::string& msg) {
    throw GameError("line " + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (!saw_header) {
      int version = 0;
      if (kw != "mwg" || !(ls >> version) || version != 1) {
        fail("expected header 'mwg 1'");
      }
      saw_header = true;
      continue;
    }
    if (kw == "dim") {
      if (dim != -1) fail("duplicate dim line");
      if (!(ls >> dim) || dim < 1) fail("bad dimension");
    } else if (kw == "state") {
      if (dim == -1) fail("dim must precede states");
      std::string name;
      int owner = 0;
      if (!(ls >> name >> owner) || (owner != 1 && owner != 2)) {
        fail("expected 'state <name> <1|2>'");
      }
      if (!valid_name(name)) fail("bad state name '" + name + "'");
      if (!state_idx.emplace(name, static_cast<int>(states.size())).second) {
        fail("duplicate state '" + name + "'");
      }
      states.push_back({name, owner == 1 ? Player::One : Player::Two});
    } else if (kw == "edge") {
      if (dim == -1) fail("dim must precede edges");
      std::string id, src, dst;
      if (!(ls >> id >> src >> dst)) fail("expected 'edge <id> <src> <dst> <w...>'");
      if (!valid_name(id)) fail("bad edge id '" + id + "'");
      auto si = state_idx.find(src);
      auto di = state_idx.find(dst);
      if (si == state_idx.end()) fail("unknown state '" + src + "'");
      if (di == state_idx.end()) fail("unknown state '" + dst + "'");
      WeightVector w(dim);
      for (int i = 0; i < dim; ++i) {
        if (!(ls >> w[i])) fail("edge '" + id + "': expected " +
                                std::to_string(dim) + " weights");
      }
      long long extra;
      if (ls >> extra) fail("edge '" + id + "': too many weights");
      edges.push_back({id, si->second, di->second, std::move(w)});
    } else if (kw == "init") {
      std::string name;
      if (!(ls >> name)) fail("expected 'init <name>'");
      if (!state_idx.count(name)) fail("unknown state '" + name + "'");
      init_name = name;
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }
  if (!saw_header) throw GameError("empty input (missing 'mwg 1' header)");
  if (dim == -1) throw GameError("missing dim line");
  if (init_name.empty()) throw GameError("missing init line");
  return GameGraph(dim, std::move(states), std::move(edges),
                   state_idx.at(init_name));
}

GameGraph parse_game(const std::string& text) {
  std::istringstream in(text);
  return parse_game(in);
}

std::string serialize_game(const GameGraph& g) {
  std::ostringstream os;
  os << "mwg 1\n";
  os << "dim " << g.dimension() << "\n";
  for (const State& s : g.states()) {
    os << "state " << s.name << ' ' << (s.owner == Player::One ? 1 : 2)
       << "\n";
  }
  for (const Edge& e : g.edges()) {
    os << "edge " << e.id << ' ' << g.state(e.src).name << ' '
       << g.state(e.dst).name;
    for (Weight w : e.weight) os << ' ' << w;
    os << "\n";
  }
  os << "init " << g.state(g.initial()).name << "\n";
  return os.str();
}

GameGraph shift_weights(const GameGraph& g,
                        const std::vector<Rat>& thresholds) {
  if (static_cast<int>(thresholds.size()) != g.dimension()) {
    throw GameError("threshold vector has wrong dimension");
  }
  std::vector<long long> a(g.dimension()), b(g.dimension());
  for (int i = 0; i < g.dimension(); ++i) {
    const Rat& t = thresholds[i];
    if (t.get_den() == 0) throw GameError("zero threshold denominator");
    if (!t.get_num().fits_slong_p() || !t.get_den().fits_slong_p()) {
      throw GameError("threshold out of range");
    }
    a[i] = t.get_num().get_si();
    b[i] = t.get_den().get_si();  // canonical mpq denominators are positive
  }
  std::vector<Edge> edges = g.edges();
  for (Edge& e : edges) {
    for (int i = 0; i < g.dimension(); ++i) {
      e.weight[i] = b[i] * e.weight[i] - a[i];
    }
  }
  return GameGraph(g.dimension(), g.states(), std::move(edges), g.initial());
}

GameGraph restrict(const GameGraph& g, const std::vector<int>& T) {
  std::vector<int> keep(g.num_states(), -1);
  std::vector<State> states;
  for (int s : T) {
    if (s < 0 || s >= g.num_states()) throw GameError("restrict: bad state");
    if (keep[s] != -1) continue;
    keep[s] = static_cast<int>(states.size());
    states.push_back(g.state(s));
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (keep[e.src] != -1 && keep[e.dst] != -1) {
      edges.push_back({e.id, keep[e.src], keep[e.dst], e.weight});
    }
  }
  std::vector<char> has_out(states.size(), 0);
  for (const Edge& e : edges) has_out[e.src] = 1;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!has_out[i]) {
      throw GameError("restrict: state '" + states[i].name +
                      "' loses all outgoing edges");
    }
  }
  int init = keep[g.initial()] != -1 ? keep[g.initial()] : 0;
  return GameGraph(g.dimension(), std::move(states), std::move(edges), init);
}

std::vector<int> attractor(const GameGraph& g, Player player,
                           const std::vector<int>& T) {
  std::vector<char> in_attr(g.num_states(), 0);
  std::vector<int> pending_succ(g.num_states(), 0);
  for (int s = 0; s < g.num_states(); ++s) {
    pending_succ[s] = static_cast<int>(g.out(s).size());
  }
  std::vector<std::vector<int>> preds(g.num_states());
  for (int e = 0; e < g.num_edges(); ++e) {
    preds[g.edge(e).dst].push_back(g.edge(e).src);
  }
  std::vector<int> queue;
  for (int s : T) {
    if (s < 0 || s >= g.num_states()) throw GameError("attractor: bad state");
    if (!in_attr[s]) {
      in_attr[s] = 1;
      queue.push_back(s);
    }
  }
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int t = queue[qi];
    for (int p : preds[t]) {
      if (in_attr[p]) continue;
      if (g.state(p).owner == player) {
        in_attr[p] = 1;
        queue.push_back(p);
      } else if (--pending_succ[p] <= 0) {
        // Opponent state: all successors lead into the attractor. The
        // counter over-counts parallel edges to t on repeat visits, so
        // recheck explicitly before committing.
        bool all_in = true;
        for (int e : g.out(p)) {
          if (!in_attr[g.edge(e).dst]) {
            all_in = false;
            break;
          }
        }
        if (all_in) {
          in_attr[p] = 1;
          queue.push_back(p);
        }
      }
    }
  }
  std::vector<int> result;
  for (int s = 0; s < g.num_states(); ++s) {
    if (in_attr[s]) result.push_back(s);
  }
  return result;
}

namespace {

// Iterative Tarjan; emits SCCs in reverse topological order.
struct TarjanCtx {
  const GameGraph& g;
  std::vector<int> index, low, stack;
  std::vector<char> on_stack;
  int counter = 0;
  std::vector<std::vector<int>> sccs;

  explicit TarjanCtx(const GameGraph& gg)
      : g(gg),
        index(gg.num_states(), -1),
        low(gg.num_states(), 0),
        on_stack(gg.num_states(), 0) {}

  void run(int root) {
    struct Frame {
      int v;
      std::size_t ei;
    };
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.ei < g.out(f.v).size()) {
        int w = g.edge(g.out(f.v)[f.ei++]).dst;
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) {
          low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        }
        if (low[v] == index[v]) {
          std::vector<int> comp;
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp.push_back(w);
          } while (w != v);
          std::sort(comp.begin(), comp.end());
          sccs.push_back(std::move(comp));
        }
      }
    }
  }
};

}  // namespace

std::vector<std::vector<int>> scc_decomposition(const GameGraph& g) {
  TarjanCtx ctx(g);
  for (int s = 0; s < g.num_states(); ++s) {
    if (ctx.index[s] == -1) ctx.run(s);
  }
  return ctx.sccs;
}

static void validate_prefix(const GameGraph& g, const PlayPrefix& p) {
  if (p.states.empty()) throw GameError("empty play prefix");
  if (p.edges.size() + 1 != p.states.size()) {
    throw GameError("play prefix edge/state count mismatch");
  }
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    if (p.edges[i] < 0 || p.edges[i] >= g.num_edges()) {
      throw GameError("play prefix references unknown edge");
    }
    const Edge& e = g.edge(p.edges[i]);
    if (e.src != p.states[i] || e.dst != p.states[i + 1]) {
      throw GameError("play prefix edge '" + e.id +
                      "' does not connect consecutive states");
    }
  }
}

WeightVector energy_level(const GameGraph& g, const PlayPrefix& p) {
  validate_prefix(g, p);
  WeightVector sum(g.dimension(), 0);
  for (int ei : p.edges) {
    const Edge& e = g.edge(ei);
    for (int i = 0; i < g.dimension(); ++i) sum[i] += e.weight[i];
  }
  return sum;
}

std::vector<Rat> lasso_mean_payoff(const GameGraph& g, const LassoPlay& p) {
  validate_prefix(g, p.stem);
  validate_prefix(g, p.loop);
  if (p.loop.edges.empty()) throw GameError("lasso loop must be nonempty");
  if (p.loop.states.front() != p.loop.states.back()) {
    throw GameError("lasso loop is not closed");
  }
  if (p.stem.states.back() != p.loop.states.front()) {
    throw GameError("lasso stem does not end at the loop");
  }
  WeightVector sum = energy_level(g, p.loop);
  std::vector<Rat> mp(g.dimension());
  for (int i = 0; i < g.dimension(); ++i) {
    mp[i] = Rat(static_cast<long>(sum[i]),
                static_cast<long>(p.loop.edges.size()));
    mp[i].canonicalize();
  }
  return mp;
}

void ObjectiveSpec::normalize(int k) {
  for (int d : inf_dims) {
    if (d < 0 || d >= k) throw GameError("inf dimension out of range");
  }
  for (int d : sup_dims) {
    if (d < 0 || d >= k) throw GameError("sup dimension out of range");
  }
  for (int d : inf_dims) sup_dims.erase(d);
  if (!thresholds.empty() && static_cast<int>(thresholds.size()) != k) {
    throw GameError("threshold vector has wrong dimension");
  }
}

std::vector<int> all_dims(int k) {
  std::vector<int> d(k);
  for (int i = 0; i < k; ++i) d[i] = i;
  return d;
}

bool sorted_contains(const std::vector<int>& v, int x) {
  return std::binary_search(v.begin(), v.end(), x);
}

}  // namespace mpg
