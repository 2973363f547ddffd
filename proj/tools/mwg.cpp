#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpg/certificates.hpp"
#include "mpg/game.hpp"
#include "mpg/generators.hpp"
#include "mpg/lp.hpp"
#include "mpg/multicycle.hpp"
#include "mpg/solvers.hpp"
#include "mpg/solvers_single.hpp"

namespace {

using namespace mpg;

GameGraph load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GameError("cannot open game file '" + path + "'");
  return parse_game(in);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GameError("cannot open file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw GameError("cannot open output file '" + path + "'");
  out << text;
}

// 1-based comma list on the command line -> sorted 0-based indices.
std::vector<int> parse_dim_list(const std::string& text, int k) {
  std::vector<int> dims;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    int d = std::stoi(tok);
    if (d < 1 || d > k) {
      throw GameError("dimension " + tok + " out of range 1.." +
                      std::to_string(k));
    }
    dims.push_back(d - 1);
  }
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  return dims;
}

int from_state(const GameGraph& g, const std::string& name) {
  return name.empty() ? g.initial() : g.state_index(name);
}

int emit_verdict(bool yes) {
  std::cout << (yes ? "YES" : "NO") << "\n";
  return yes ? 0 : 1;
}

int emit_validity(bool valid) {
  std::cout << (valid ? "VALID" : "INVALID") << "\n";
  return valid ? 0 : 1;
}

struct SolveArgs {
  std::string obj, game_path, inf, sup, threshold, from, cert_out;
  std::string method = "auto";
  bool force = false;
};

int run_solve(const SolveArgs& a) {
  GameGraph g = load_game(a.game_path);
  const int k = g.dimension();
  if (!a.threshold.empty()) {
    std::vector<Rat> th = parse_rat_list(a.threshold);
    if (static_cast<int>(th.size()) != k) {
      throw GameError("threshold needs one rational per dimension");
    }
    g = shift_weights(g, th);
  }
  int s0 = from_state(g, a.from);
  EnumOptions eo;
  eo.force = a.force;
  eo.extract_p1_cert = !a.cert_out.empty();

  SolveReport report;
  if (a.obj == "energy" || a.obj == "mp-fin") {
    std::string method = a.method;
    if (a.obj == "mp-fin" && method == "auto") method = "capped";
    if (method == "auto") {
      try {
        report = solve_finite_memory_mp(g, s0);
      } catch (const GameError&) {
        report = solve_energy_unknown_credit(g, s0, eo);
      }
    } else if (method == "capped") {
      report = solve_finite_memory_mp(g, s0);
    } else {
      report = solve_energy_unknown_credit(g, s0, eo);
    }
    if (!report.yes && !report.p2_certificate &&
        !a.cert_out.empty()) {
      // The capped path proves NO without a refuting strategy; find one.
      report.p2_certificate =
          solve_energy_unknown_credit(g, s0, eo).p2_certificate;
    }
  } else if (a.obj == "mp-sup") {
    DimMask dims = a.sup.empty() ? DimMask{} : parse_dim_list(a.sup, k);
    report = solve_mp_sup_region(g, dims);
    report.yes = sorted_contains(report.winning_region, s0);
    std::cerr << "region:";
    for (int s : report.winning_region) std::cerr << ' ' << g.state(s).name;
    std::cerr << "\n";
  } else if (a.obj == "mp-inf") {
    DimMask dims = a.inf.empty() ? DimMask{} : parse_dim_list(a.inf, k);
    report = solve_mp_inf(g, s0, dims, eo);
  } else if (a.obj == "mp-infsup") {
    report = solve_mp_infsup(g, parse_dim_list(a.inf, k),
                             parse_dim_list(a.sup, k), s0, eo);
  } else {
    throw GameError("unknown objective '" + a.obj + "'");
  }

  if (!a.cert_out.empty()) {
    if (report.p2_certificate) {
      write_file(a.cert_out, serialize_certificate(g, *report.p2_certificate));
    } else if (report.p1_certificate) {
      write_file(a.cert_out, serialize_certificate(g, *report.p1_certificate));
    } else {
      std::cerr << "no certificate available for this verdict\n";
    }
  }
  std::cerr << "method: " << report.method << "\n";
  if (report.stats.strategies_enumerated) {
    std::cerr << "strategies enumerated: "
              << report.stats.strategies_enumerated << "\n";
  }
  return emit_verdict(report.yes);
}

ObjectiveSpec build_objective(const std::string& obj, const std::string& inf,
                              const std::string& sup,
                              const std::string& threshold, int k) {
  ObjectiveSpec spec;
  if (obj == "energy") {
    spec.kind = ObjectiveKind::EnergyUnknownCredit;
  } else if (obj == "mp-fin") {
    spec.kind = ObjectiveKind::FiniteMemoryMP;
  } else if (obj == "mp-sup") {
    spec.kind = ObjectiveKind::MPSup;
  } else if (obj == "mp-inf") {
    spec.kind = ObjectiveKind::MPInf;
  } else if (obj == "mp-infsup") {
    spec.kind = ObjectiveKind::MPInfSup;
  } else {
    throw GameError("unknown objective '" + obj + "'");
  }
  for (int d : parse_dim_list(inf, k)) spec.inf_dims.insert(d);
  for (int d : parse_dim_list(sup, k)) spec.sup_dims.insert(d);
  if (spec.kind == ObjectiveKind::MPInf && spec.inf_dims.empty()) {
    for (int d = 0; d < k; ++d) spec.inf_dims.insert(d);
  }
  if (!threshold.empty()) {
    spec.thresholds = parse_rat_list(threshold);
    if (static_cast<int>(spec.thresholds.size()) != k) {
      throw GameError("threshold needs one rational per dimension");
    }
  }
  spec.normalize(k);
  return spec;
}

struct VerifyArgs {
  std::string game_path, cert_path, obj, inf, sup, threshold, from;
};

int run_verify(const VerifyArgs& a) {
  GameGraph g = load_game(a.game_path);
  ObjectiveSpec spec =
      build_objective(a.obj, a.inf, a.sup, a.threshold, g.dimension());
  int s0 = from_state(g, a.from);
  Certificate cert = parse_certificate(g, read_file(a.cert_path));
  if (std::holds_alternative<MemorylessStrategy>(cert)) {
    return emit_validity(
        verify_p2_certificate(g, std::get<MemorylessStrategy>(cert), s0, spec));
  }
  if (spec.kind != ObjectiveKind::EnergyUnknownCredit &&
      spec.kind != ObjectiveKind::FiniteMemoryMP) {
    throw GameError("finite-memory certificates verify the energy objectives");
  }
  GameGraph shifted =
      spec.thresholds.empty() ? g : shift_weights(g, spec.thresholds);
  const auto& [strat, credit] =
      std::get<std::pair<MooreStrategy, CreditVector>>(cert);
  auto minimal = score_p1_finite_strategy(shifted, strat, s0);
  if (!minimal) return emit_validity(false);
  for (int d = 0; d < g.dimension(); ++d) {
    if (minimal->v[d] > credit.v[d]) return emit_validity(false);
  }
  return emit_validity(true);
}

struct GenerateArgs {
  std::string kind, cnf_path, graph_path, name, terminals, out;
  bool unit = false;
  int states = 4, dim = 2, max_weight = 2;
  double p2 = 0.5;
  std::uint64_t seed = 1;
};

int run_generate(const GenerateArgs& a) {
  std::optional<GameGraph> g;
  if (a.kind == "3sat") {
    std::ifstream in(a.cnf_path);
    if (!in) throw GameError("cannot open '" + a.cnf_path + "'");
    g = from_3sat(parse_dimacs(in));
  } else if (a.kind == "disjoint-paths") {
    std::ifstream in(a.graph_path);
    if (!in) throw GameError("cannot open '" + a.graph_path + "'");
    Digraph d = parse_digraph(in);
    std::vector<int> t;
    std::istringstream ts(a.terminals);
    std::string tok;
    while (std::getline(ts, tok, ',')) t.push_back(std::stoi(tok));
    if (t.size() != 4) throw GameError("need --terminals w,x,y,z");
    g = from_disjoint_paths(d, t[0], t[1], t[2], t[3], a.unit);
  } else if (a.kind == "fixture") {
    g = fixture(a.name);
  } else if (a.kind == "random") {
    g = random_game(a.states, a.dim, a.max_weight, a.p2, a.seed);
  } else {
    throw GameError("unknown generator '" + a.kind + "'");
  }
  std::string text = serialize_game(*g);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_file(a.out, text);
  }
  return 0;
}

int run_eval(const std::string& lasso, const std::string& game_path) {
  GameGraph g = load_game(game_path);
  auto slash = lasso.find('/');
  if (slash == std::string::npos) {
    throw GameError("lasso needs a '/' between stem and loop");
  }
  auto tokens = [](const std::string& part) {
    std::istringstream in(part);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
  };
  std::vector<std::string> stem_names = tokens(lasso.substr(0, slash));
  std::vector<std::string> loop_names = tokens(lasso.substr(slash + 1));
  if (loop_names.empty()) throw GameError("lasso loop must be nonempty");
  auto edge_between = [&](int src, int dst) {
    for (int e : g.out(src)) {
      if (g.edge(e).dst == dst) return e;
    }
    throw GameError("no edge from '" + g.state(src).name + "' to '" +
                    g.state(dst).name + "'");
  };
  LassoPlay play;
  for (const std::string& n : stem_names) {
    play.stem.states.push_back(g.state_index(n));
  }
  for (const std::string& n : loop_names) {
    play.loop.states.push_back(g.state_index(n));
  }
  if (play.stem.states.empty()) {
    play.stem.states.push_back(play.loop.states.front());
  }
  play.loop.states.push_back(play.loop.states.front());  // implicit closure
  for (std::size_t i = 0; i + 1 < play.stem.states.size(); ++i) {
    play.stem.edges.push_back(
        edge_between(play.stem.states[i], play.stem.states[i + 1]));
  }
  for (std::size_t i = 0; i + 1 < play.loop.states.size(); ++i) {
    play.loop.edges.push_back(
        edge_between(play.loop.states[i], play.loop.states[i + 1]));
  }
  std::vector<Rat> mp = lasso_mean_payoff(g, play);
  for (std::size_t d = 0; d < mp.size(); ++d) {
    std::cout << (d ? " " : "") << rat_to_string(mp[d]);
  }
  std::cout << "\n";
  return 0;
}

struct SimulateArgs {
  std::string kind, game_path, threshold, from, alpha = "1/2";
  long long horizon = 10000;
  int phases = 6;
  long long max_steps = 1000000;
};

// A per-dimension strategy whose every terminal cycle has nonnegative mean
// in that dimension; suitable for round-robin interleaving.
MemorylessStrategy dim_strategy(const GameGraph& g, int dim) {
  std::optional<MemorylessStrategy> found;
  for_each_memoryless_strategy(
      g, Player::One, [&](const MemorylessStrategy& l1) {
        std::vector<int> next(g.num_states());
        for (int s = 0; s < g.num_states(); ++s) {
          next[s] = g.edge(l1.choice[s]).dst;
        }
        for (int s = 0; s < g.num_states(); ++s) {
          // Locate the terminal cycle of s in the functional graph.
          int slow = s, fast = s;
          do {
            slow = next[slow];
            fast = next[next[fast]];
          } while (slow != fast);
          long long sum = 0;
          int cur = slow;
          do {
            sum += g.edge(l1.choice[cur]).weight[dim];
            cur = next[cur];
          } while (cur != slow);
          if (sum < 0) return true;  // bad cycle: next strategy
        }
        found = l1;
        return false;
      });
  if (!found) {
    throw GameError("no strategy pumps dimension " + std::to_string(dim + 1));
  }
  return *found;
}

int run_simulate(const SimulateArgs& a) {
  GameGraph g = load_game(a.game_path);
  if (!a.threshold.empty()) {
    std::vector<Rat> th = parse_rat_list(a.threshold);
    if (static_cast<int>(th.size()) != g.dimension()) {
      throw GameError("threshold needs one rational per dimension");
    }
    g = shift_weights(g, th);
  }
  if (a.kind == "pump") {
    auto witness = nonneg_multicycle(g);
    if (!witness) {
      throw GameError("component has no nonnegative multi-cycle to pump");
    }
    Rat alpha = parse_rat(a.alpha);
    EpsilonSchedule sched = pump_schedule_from_witness(g, *witness, alpha);
    long long horizon = std::max(a.horizon, sched.warmup + 1);
    ScheduleTrace trace = simulate_schedule(g, sched, horizon);
    std::cerr << "steps: " << trace.steps << "  warmup: " << sched.warmup
              << "\n";
    for (int d = 0; d < g.dimension(); ++d) {
      std::cerr << "min post-warmup average dim " << (d + 1) << ": "
                << rat_to_string(trace.post_warmup_min_average[d]) << "\n";
    }
    return emit_validity(trace.bound_met);
  }
  if (a.kind == "interleave") {
    int s0 = from_state(g, a.from);
    std::vector<MemorylessStrategy> lambda1;
    for (int d = 0; d < g.dimension(); ++d) {
      lambda1.push_back(dim_strategy(g, d));
    }
    InterleaveTrace trace =
        simulate_interleaved_sup(g, lambda1, s0, a.phases, a.max_steps);
    bool ok = !trace.timed_out &&
              static_cast<int>(trace.phases.size()) == a.phases;
    for (const auto& ph : trace.phases) {
      std::cerr << "phase dim " << (ph.dim + 1) << " alpha "
                << rat_to_string(ph.alpha) << " boundary " << ph.boundary_step
                << " average " << rat_to_string(ph.prefix_average[ph.dim])
                << (ph.bound_met ? " ok" : " violated") << "\n";
      ok = ok && ph.bound_met;
    }
    if (trace.timed_out) std::cerr << "timed out\n";
    return emit_validity(ok);
  }
  throw GameError("unknown simulation '" + a.kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-dimensional mean-payoff and energy game toolkit"};
  app.require_subcommand(1);

  SolveArgs sa;
  CLI::App* solve = app.add_subcommand("solve", "decide an objective");
  solve->add_option("--obj", sa.obj, "energy|mp-fin|mp-sup|mp-inf|mp-infsup")
      ->required();
  solve->add_option("--inf", sa.inf, "liminf dimensions, 1-based");
  solve->add_option("--sup", sa.sup, "limsup dimensions, 1-based");
  solve->add_option("--threshold", sa.threshold, "per-dimension rationals");
  solve->add_option("--from", sa.from, "start state (default: init)");
  solve->add_option("--cert", sa.cert_out, "write the certificate here");
  solve->add_option("--method", sa.method, "auto|enum|capped");
  solve->add_flag("--force", sa.force, "lift the enumeration guard");
  solve->add_option("game", sa.game_path, "game file")->required();

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand("verify", "check a certificate");
  verify->add_option("--game", va.game_path)->required();
  verify->add_option("--cert", va.cert_path)->required();
  verify->add_option("--obj", va.obj)->required();
  verify->add_option("--inf", va.inf);
  verify->add_option("--sup", va.sup);
  verify->add_option("--threshold", va.threshold);
  verify->add_option("--from", va.from);

  GenerateArgs ga;
  CLI::App* generate = app.add_subcommand("generate", "produce a game");
  generate->add_option("kind", ga.kind, "3sat|disjoint-paths|fixture|random")
      ->required();
  generate->add_option("--cnf", ga.cnf_path, "DIMACS input");
  generate->add_option("--graph", ga.graph_path, "digraph input");
  generate->add_option("--terminals", ga.terminals, "w,x,y,z vertex ids");
  generate->add_flag("--unit", ga.unit, "unit-weight variant");
  generate->add_option("--name", ga.name, "fixture name");
  generate->add_option("--states", ga.states);
  generate->add_option("--dim", ga.dim);
  generate->add_option("--max-weight", ga.max_weight);
  generate->add_option("--p2", ga.p2, "player-2 ownership fraction");
  generate->add_option("--seed", ga.seed);
  generate->add_option("-o,--out", ga.out, "output path (default stdout)");

  std::string lasso, eval_game;
  CLI::App* eval = app.add_subcommand("eval", "lasso mean payoff");
  eval->add_option("--lasso", lasso, "\"s0 s1 / s2 s3\"")->required();
  eval->add_option("game", eval_game)->required();

  SimulateArgs ma;
  CLI::App* simulate = app.add_subcommand("simulate", "play a schedule");
  simulate->add_option("kind", ma.kind, "pump|interleave")->required();
  simulate->add_option("--alpha", ma.alpha, "tolerance rational");
  simulate->add_option("--horizon", ma.horizon, "pump steps");
  simulate->add_option("--phases", ma.phases, "interleave phases");
  simulate->add_option("--max-steps", ma.max_steps);
  simulate->add_option("--threshold", ma.threshold);
  simulate->add_option("--from", ma.from);
  simulate->add_option("game", ma.game_path)->required();

  try {
    app.parse(argc, argv);
    if (*solve) return run_solve(sa);
    if (*verify) return run_verify(va);
    if (*generate) return run_generate(ga);
    if (*eval) return run_eval(lasso, eval_game);
    if (*simulate) return run_simulate(ma);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
