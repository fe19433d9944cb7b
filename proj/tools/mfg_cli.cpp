// mfg: validate, solve, equilibrium, simulate, verify and oracle subcommands.
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfg/acceptance.h"
#include "mfg/config.h"
#include "mfg/equilibrium.h"
#include "mfg/filter.h"
#include "mfg/flow.h"
#include "mfg/io.h"
#include "mfg/oracle.h"
#include "mfg/rng.h"
#include "mfg/simulator.h"
#include "mfg/solver.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kInputError = 2;
constexpr int kResourceLimit = 3;

// Doubles in reports carry 12 significant digits, like the CSV artifacts.
double rounded(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(mfg::io::num(v));
}

json jflow(const mfg::MeasureFlow& flow) {
  json out = json::array();
  for (const auto& m : flow.measures()) {
    json row = json::array();
    for (double w : m.weights()) row.push_back(rounded(w));
    out.push_back(row);
  }
  return out;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

struct Run {
  explicit Run(std::string sub = {}, fs::path dir = {})
      : subcommand(std::move(sub)), out(std::move(dir)), started(utc_now()) {}

  std::string subcommand;
  fs::path out;
  json config = json::object();
  json seeds = json::array();
  std::string digest;
  std::string started;

  void write_manifest() const {
    if (out.empty()) return;
    json m;
    m["subcommand"] = subcommand;
    m["config"] = config;
    m["model_digest"] = digest;
    m["seeds"] = seeds;
    m["tool_version"] = MFG_VERSION;
    m["started_utc"] = started;
    m["finished_utc"] = utc_now();
    mfg::io::write_text(out / "manifest.json", m.dump(2) + "\n");
  }

  void write(const std::string& name, const std::string& text) const {
    if (!out.empty()) mfg::io::write_text(out / name, text);
  }
};

mfg::LoadedModel load(const std::string& path, Run& run) {
  auto lm = mfg::load_model(path);
  run.digest = mfg::hex_digest(lm.digest);
  run.config["model"] = path;
  run.config["model_name"] = lm.name;
  return lm;
}

// Throws ConfigError on structural problems that make the model unusable.
// A well-formed config whose model breaks an invariant is a domain violation (exit 1).
struct InvalidModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_valid(const mfg::GameModel& model) {
  const auto v = mfg::validate(model);
  if (!v.empty()) throw InvalidModel("model fails validation: " + v.front());
}

mfg::TerminalMode parse_terminal(const std::string& s) {
  if (s == "zero") return mfg::TerminalMode::zero;
  if (s == "tail_upper") return mfg::TerminalMode::tail_upper;
  throw mfg::ConfigError("--terminal must be 'zero' or 'tail_upper'");
}

mfg::MeasureFlow flow_for(const mfg::GameModel& model, const std::string& flow_arg, int horizon) {
  if (flow_arg == "recursive-from-initial") {
    return mfg::MeasureFlow::recursive_from_initial(model, horizon);
  }
  mfg::MeasureFlow read = mfg::io::read_flow_csv(flow_arg);
  if (read.horizon() < horizon) {
    throw mfg::ConfigError("flow csv has " + std::to_string(read.size()) +
                           " entries; the horizon needs " + std::to_string(horizon + 2));
  }
  if (read[0].size() != model.num_states()) {
    throw mfg::ConfigError("flow csv has the wrong number of states");
  }
  if (mfg::l1_distance(read[0].weights(), model.initial().weights()) > 1e-9) {
    throw mfg::ConfigError("flow csv entry 0 differs from the model's initial measure");
  }
  // The CSV stores 12 digits; entry 0 is the model's own initial measure.
  std::vector<mfg::Measure> ms{model.initial()};
  for (int t = 1; t <= horizon + 1; ++t) ms.push_back(read[static_cast<std::size_t>(t)]);
  return mfg::MeasureFlow(std::move(ms));
}

// ---------------------------------------------------------------- validate

int cmd_validate(const std::string& model_path) {
  Run run;
  const auto lm = load(model_path, run);
  const auto v = mfg::validate(*lm.model);
  for (const auto& s : v) std::printf("violation: %s\n", s.c_str());
  std::printf("%s: %zu violation%s (digest %s)\n", lm.name.c_str(), v.size(),
              v.size() == 1 ? "" : "s", run.digest.c_str());
  return v.empty() ? kOk : kViolation;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string model;
  std::string flow = "recursive-from-initial";
  int horizon = 3;
  std::string terminal = "zero";
  std::size_t node_budget = 5'000'000;
  std::string out;
};

int cmd_solve(const SolveArgs& a) {
  Run run{"solve", a.out};
  const auto lm = load(a.model, run);
  require_valid(*lm.model);
  run.config["flow"] = a.flow;
  run.config["horizon"] = a.horizon;
  run.config["terminal"] = a.terminal;
  run.config["node_budget"] = a.node_budget;
  if (a.horizon < 0) throw mfg::ConfigError("--horizon must be nonnegative");

  const mfg::MeasureFlow flow = flow_for(*lm.model, a.flow, a.horizon);
  mfg::SolveOptions so;
  so.horizon = a.horizon;
  so.terminal = parse_terminal(a.terminal);
  so.node_budget = a.node_budget;
  const mfg::Solution sol = mfg::solve_pomdp(*lm.model, flow, so);
  const double lower = mfg::solve_on_tree(sol.tree, mfg::TerminalMode::zero).root_value();
  const double upper = mfg::solve_on_tree(sol.tree, mfg::TerminalMode::tail_upper).root_value();
  const double opt = mfg::optimality_residual(sol.policy, sol.values);

  json rep;
  rep["root_value"] = rounded(sol.root_value());
  rep["value_bracket"] = {rounded(lower), rounded(upper)};
  rep["root_action"] = sol.policy.at(sol.tree->root());
  rep["optimality_residual"] = rounded(opt);
  rep["nodes"] = sol.tree->size();
  run.config["optimality_residual"] = rounded(opt);
  run.write("report.json", rep.dump(2) + "\n");
  run.write("policy.csv", mfg::io::policy_csv(sol.policy));
  run.write("flow.csv", mfg::io::flow_csv(flow));
  run.write_manifest();
  std::printf("root value %s, bracket [%s, %s], root action %d, optimality residual %s, %zu nodes\n",
              mfg::io::num(sol.root_value()).c_str(), mfg::io::num(lower).c_str(),
              mfg::io::num(upper).c_str(), sol.policy.at(sol.tree->root()),
              mfg::io::num(opt).c_str(), sol.tree->size());
  return kOk;
}

// ---------------------------------------------------------------- equilibrium

struct EquilibriumArgs {
  std::string model;
  int horizon = 3;
  double tol = 1e-10;
  std::string damping = "constant";
  double lambda = 1.0;
  int max_iters = 500;
  std::string terminal = "zero";
  std::string out;
};

mfg::EquilibriumConfig equilibrium_config(const EquilibriumArgs& a) {
  mfg::EquilibriumConfig cfg;
  if (a.damping == "constant") {
    cfg.damping = mfg::DampingMode::constant;
  } else if (a.damping == "fictitious_play") {
    cfg.damping = mfg::DampingMode::fictitious_play;
  } else {
    throw mfg::ConfigError("--damping must be 'constant' or 'fictitious_play'");
  }
  if (a.horizon < 0) throw mfg::ConfigError("--horizon must be nonnegative");
  cfg.lambda = a.lambda;
  cfg.tol = a.tol;
  cfg.max_iters = a.max_iters;
  cfg.solve.horizon = a.horizon;
  cfg.solve.terminal = parse_terminal(a.terminal);
  try {
    cfg.check();
  } catch (const std::invalid_argument& e) {
    throw mfg::ConfigError(e.what());
  }
  return cfg;
}

void echo_equilibrium(const EquilibriumArgs& a, Run& run) {
  run.config["horizon"] = a.horizon;
  run.config["tol"] = a.tol;
  run.config["damping"] = a.damping;
  run.config["lambda"] = a.lambda;
  run.config["max_iters"] = a.max_iters;
  run.config["terminal"] = a.terminal;
}

json equilibrium_json(const mfg::EquilibriumReport& r) {
  json rep;
  rep["converged"] = r.converged;
  rep["iterations"] = r.iterations;
  rep["best_iteration"] = r.best_iteration;
  rep["residual"] = rounded(r.residual);
  json hist = json::array();
  for (double v : r.residual_history) hist.push_back(rounded(v));
  rep["residual_history"] = hist;
  rep["optimality_residual"] = rounded(r.optimality_residual);
  rep["value_bracket"] = {rounded(r.value_lower), rounded(r.value_upper)};
  rep["flow"] = jflow(r.flow);
  return rep;
}

int cmd_equilibrium(const EquilibriumArgs& a) {
  Run run{"equilibrium", a.out};
  const auto lm = load(a.model, run);
  require_valid(*lm.model);
  echo_equilibrium(a, run);
  const auto cfg = equilibrium_config(a);
  const auto r = mfg::find_equilibrium(*lm.model, cfg);
  json rep = equilibrium_json(r);
  rep["monotonicity_diagnostic"] = rounded(mfg::monotonicity_diagnostic(
      *lm.model, mfg::state_action_flow(r.policy), mfg::state_action_flow(r.policy), a.horizon));
  run.write("report.json", rep.dump(2) + "\n");
  run.write("flow.csv", mfg::io::flow_csv(r.flow));
  run.write("induced_flow.csv", mfg::io::flow_csv(r.induced));
  run.write("policy.csv", mfg::io::policy_csv(r.policy));
  run.write_manifest();
  std::printf("%s after %d iterations: residual %s (best at iteration %d), optimality residual %s, "
              "value bracket [%s, %s]\n",
              r.converged ? "converged" : "NOT converged", r.iterations,
              mfg::io::num(r.residual).c_str(), r.best_iteration,
              mfg::io::num(r.optimality_residual).c_str(), mfg::io::num(r.value_lower).c_str(),
              mfg::io::num(r.value_upper).c_str());
  return r.converged ? kOk : kViolation;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  EquilibriumArgs eq;
  std::vector<int> Ns{25};
  int reps = 200;
  std::uint64_t seed = 12345;
  std::string deviations = "default";
  int threads = 0;
};

std::vector<mfg::NamedPolicy> select_deviations(std::vector<mfg::NamedPolicy> all,
                                                const std::string& spec) {
  if (spec == "default" || spec == "all") return all;
  if (spec == "none") return {};
  std::vector<mfg::NamedPolicy> out;
  std::stringstream ss(spec);
  std::string name;
  while (std::getline(ss, name, ',')) {
    bool found = false;
    for (const auto& d : all) {
      if (d.name == name) {
        out.push_back(d);
        found = true;
      }
    }
    if (!found) {
      std::string known;
      for (const auto& d : all) known += " " + d.name;
      throw mfg::ConfigError("--deviations: unknown deviation '" + name + "'; known:" + known);
    }
  }
  return out;
}

int cmd_simulate(const SimulateArgs& a) {
  Run run{"simulate", a.eq.out};
  const auto lm = load(a.eq.model, run);
  require_valid(*lm.model);
  echo_equilibrium(a.eq, run);
  run.config["N"] = a.Ns;
  run.config["reps"] = a.reps;
  run.config["deviations"] = a.deviations;
  run.config["seed"] = a.seed;
  run.seeds.push_back(a.seed);
  for (int N : a.Ns) {
    if (N < 1) throw mfg::ConfigError("--N values must be at least 1");
  }
  if (a.reps < 1) throw mfg::ConfigError("--reps must be at least 1");

  const auto& model = *lm.model;
  if (model.observation_depends_on_measure()) {
    std::fprintf(stderr, "simulation refused: the observation kernel depends on the mean-field "
                         "term; agents filter with local observations only\n");
    return kViolation;
  }
  const auto eq = mfg::find_equilibrium(model, equilibrium_config(a.eq));
  mfg::SimConfig sc;
  sc.reps = a.reps;
  sc.horizon = a.eq.horizon;
  sc.seed = a.seed;
  sc.threads = a.threads;

  json rep;
  rep["equilibrium"] = equilibrium_json(eq);
  rep["splitting_rule"] = mfg::rng::kSplittingRule;
  rep["seed"] = a.seed;
  json per_n = json::array();
  for (int N : a.Ns) {
    sc.N = N;
    const auto s = mfg::simulate_shared(model, eq.policy, sc);
    json e;
    e["N"] = N;
    e["J"] = rounded(s.J.mean);
    e["stderr"] = rounded(s.J.se);
    e["tail_bracket"] = rounded(s.tail_bracket);
    e["fallback_count"] = s.fallback_count;
    e["decision_count"] = s.decision_count;
    e["fallback_fraction"] = rounded(s.fallback_fraction());
    e["fallback_flagged"] = s.fallback_flagged();
    json trace = json::array();
    for (const auto& m : s.empirical_trace) {
      json row = json::array();
      for (double w : m) row.push_back(rounded(w));
      trace.push_back(row);
    }
    e["empirical_measures_rep0"] = trace;
    per_n.push_back(e);
    std::printf("N=%d: J=%s (se %s), tail bracket %s, off-tree fallbacks %zu/%zu%s\n", N,
                mfg::io::num(s.J.mean).c_str(), mfg::io::num(s.J.se).c_str(),
                mfg::io::num(s.tail_bracket).c_str(), s.fallback_count, s.decision_count,
                s.fallback_flagged() ? " (FLAGGED: above 1%)" : "");
  }
  rep["shared"] = per_n;

  std::vector<mfg::TestFunction> fns;
  for (std::size_t x = 0; x < model.num_states(); ++x) {
    mfg::TestFunction f{"ind_" + std::to_string(x), std::vector<double>(model.num_states(), 0.0)};
    f.values[x] = 1.0;
    fns.push_back(std::move(f));
  }
  if (model.states().has_coords()) fns.push_back({"coord", model.states().coords});
  const auto table = mfg::empirical_convergence(model, eq.policy, eq.flow, sc, a.Ns, fns);
  run.write("convergence.csv", mfg::io::convergence_csv(table));
  run.write("one_step.csv", mfg::io::one_step_csv(table));

  const auto devs = select_deviations(
      mfg::default_deviations(model, eq.flow, eq.policy.tree->options(), a.seed), a.deviations);
  if (!devs.empty()) {
    const auto eps = mfg::estimate_eps(model, eq.policy, devs, sc, a.Ns);
    run.write("eps.csv", mfg::io::eps_csv(eps));
    json ej = json::array();
    for (const auto& p : eps) {
      ej.push_back({{"N", p.N}, {"eps_hat", rounded(p.eps_hat)}, {"stderr", rounded(p.se)},
                    {"ci", {rounded(p.ci_lo), rounded(p.ci_hi)}}, {"best_deviation", p.best_deviation}});
      std::printf("N=%d: eps_hat=%s CI [%s, %s] (best deviation %s; a lower bound on epsilon)\n",
                  p.N, mfg::io::num(p.eps_hat).c_str(), mfg::io::num(p.ci_lo).c_str(),
                  mfg::io::num(p.ci_hi).c_str(), p.best_deviation.c_str());
    }
    rep["eps"] = ej;
  }
  run.write("report.json", rep.dump(2) + "\n");
  run.write_manifest();
  return kOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const std::string& models, std::uint64_t seed, int threads, const std::string& out) {
  Run run{"verify", out};
  run.config["models_dir"] = models;
  run.config["seed"] = seed;
  run.seeds.push_back(seed);
  std::uint64_t digest = mfg::fnv1a("");
  for (const char* name : {"decoupled", "coupled_toy", "gaussian", "unit_cost"}) {
    digest ^= mfg::load_model(fs::path(models) / (std::string(name) + ".json")).digest;
  }
  run.digest = mfg::hex_digest(digest);

  mfg::acceptance::Options opt;
  opt.models_dir = models;
  opt.seed = seed;
  opt.threads = threads;
  const auto suite = mfg::acceptance::run_all(opt);
  json rep = json::array();
  for (const auto& c : suite.criteria) {
    std::printf("%s\n", mfg::acceptance::format_line(c).c_str());
    rep.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  for (const auto& [file, text] : suite.artifacts) run.write(file, text);
  run.write("report.json", rep.dump(2) + "\n");
  run.write_manifest();
  return suite.passed() ? kOk : kViolation;
}

// ---------------------------------------------------------------- oracle

int cmd_oracle(const std::string& model_path, bool filter, bool solver, int horizon, int depth,
               const std::string& out) {
  Run run{"oracle", out};
  const auto lm = load(model_path, run);
  require_valid(*lm.model);
  const auto& model = *lm.model;
  run.config["horizon"] = horizon;
  run.config["depth"] = depth;
  if (!filter && !solver) filter = solver = true;
  bool ok = true;

  if (filter) {
    const auto flow = mfg::MeasureFlow::recursive_from_initial(model, depth);
    std::ostringstream csv;
    csv << "actions,observations,state,exact,recursive\n";
    double worst = 0.0;
    std::vector<std::size_t> acts, obs;
    std::function<void(const mfg::Belief&)> walk = [&](const mfg::Belief& z) {
      if (!acts.empty()) {
        const auto exact = mfg::oracle::exact_conditional(model, flow, acts, obs);
        std::string as, ys;
        for (std::size_t k = 0; k < acts.size(); ++k) {
          as += (k ? ";" : "") + std::to_string(acts[k]);
          ys += (k ? ";" : "") + std::to_string(obs[k]);
        }
        for (std::size_t x = 0; x < model.num_states(); ++x) {
          worst = std::max(worst, std::abs(exact.posterior[x] - z.weights[x]));
          csv << as << "," << ys << "," << x << "," << mfg::io::num(exact.posterior[x]) << ","
              << mfg::io::num(z.weights[x]) << "\n";
        }
        std::printf("a=[%s] y=[%s] exact:", as.c_str(), ys.c_str());
        for (double v : exact.posterior) std::printf(" %s", mfg::io::num(v).c_str());
        std::printf("  filter:");
        for (double v : z.weights) std::printf(" %s", mfg::io::num(v).c_str());
        std::printf("\n");
      }
      if (static_cast<int>(acts.size()) == depth) return;
      const auto t = static_cast<std::size_t>(z.time);
      for (std::size_t a = 0; a < model.num_actions(); ++a) {
        for (std::size_t y = 0; y < model.num_obs(); ++y) {
          const auto next = mfg::bayes_update(model, z, a, y, flow[t], flow[t + 1]);
          acts.push_back(a);
          obs.push_back(y);
          walk(next);
          acts.pop_back();
          obs.pop_back();
        }
      }
    };
    walk(mfg::Belief{0, model.initial().vec()});
    run.write("oracle_filter.csv", csv.str());
    std::printf("filter oracle: max abs error %s\n", mfg::io::num(worst).c_str());
    ok = ok && worst <= 1e-10;
  }

  if (solver) {
    const auto flow = mfg::MeasureFlow::recursive_from_initial(model, horizon);
    mfg::SolveOptions so;
    so.horizon = horizon;
    const auto sol = mfg::solve_pomdp(model, flow, so);
    const auto ex = mfg::oracle::exhaustive_policy_minimum(model, flow, horizon);
    json rep;
    rep["model_name"] = lm.name;
    rep["flow"] = "recursive-from-initial";
    rep["horizon"] = horizon;
    rep["policies_enumerated"] = ex.policies;
    rep["exhaustive_minimum"] = rounded(ex.minimum);
    rep["solver_root_value"] = rounded(sol.root_value());
    run.write("oracle_solver.json", rep.dump(2) + "\n");
    std::printf("solver oracle: exhaustive minimum %s over %zu policies, solver %s\n",
                mfg::io::num(ex.minimum).c_str(), ex.policies, mfg::io::num(sol.root_value()).c_str());
    ok = ok && std::abs(ex.minimum - sol.root_value()) <= 1e-9;
  }
  run.write_manifest();
  return ok ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partially observed mean-field games on finite grids"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", MFG_VERSION);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: MFG_THREADS or 1)");

  std::string validate_model;
  auto* validate = app.add_subcommand("validate", "Check a model config for violations");
  validate->add_option("--model", validate_model, "Model config path")->required();

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve the belief-state control problem for a fixed flow");
  solve->add_option("--model", solve_args.model)->required();
  solve->add_option("--flow", solve_args.flow, "Flow CSV path or 'recursive-from-initial'");
  solve->add_option("--horizon", solve_args.horizon);
  solve->add_option("--terminal", solve_args.terminal, "zero | tail_upper");
  solve->add_option("--node-budget", solve_args.node_budget);
  solve->add_option("--out", solve_args.out, "Output directory");

  auto add_eq = [](CLI::App* sub, EquilibriumArgs& a) {
    sub->add_option("--model", a.model)->required();
    sub->add_option("--horizon", a.horizon);
    sub->add_option("--tol", a.tol);
    sub->add_option("--damping", a.damping, "constant | fictitious_play");
    sub->add_option("--lambda", a.lambda, "Constant damping step in (0, 1]");
    sub->add_option("--max-iters", a.max_iters);
    sub->add_option("--terminal", a.terminal, "zero | tail_upper");
    sub->add_option("--out", a.out, "Output directory");
  };
  EquilibriumArgs eq_args;
  auto* equilibrium = app.add_subcommand("equilibrium", "Search for a mean-field equilibrium");
  add_eq(equilibrium, eq_args);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Simulate the finite-N game under the equilibrium policy");
  add_eq(simulate, sim_args.eq);
  simulate->add_option("--N", sim_args.Ns, "Agent counts, comma separated")->delimiter(',');
  simulate->add_option("--reps", sim_args.reps);
  simulate->add_option("--seed", sim_args.seed);
  simulate->add_option("--deviations", sim_args.deviations,
                       "default | none | comma list of deviation names");

  std::string verify_models = MFG_MODELS_DIR, verify_out;
  std::uint64_t verify_seed = 12345;
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite on the bundled models");
  verify->add_option("--models", verify_models, "Directory with the bundled models");
  verify->add_option("--seed", verify_seed);
  verify->add_option("--out", verify_out, "Output directory");

  std::string oracle_model, oracle_out;
  bool oracle_filter = false, oracle_solver = false;
  int oracle_horizon = 3, oracle_depth = 2;
  auto* oracle = app.add_subcommand("oracle", "Brute-force filter and solver checks on a tiny model");
  oracle->add_option("--model", oracle_model)->required();
  oracle->add_flag("--filter", oracle_filter, "Joint-enumeration filter oracle");
  oracle->add_flag("--solver", oracle_solver, "Exhaustive-policy solver oracle");
  oracle->add_option("--horizon", oracle_horizon, "Solver oracle horizon");
  oracle->add_option("--depth", oracle_depth, "Filter oracle sequence length");
  oracle->add_option("--out", oracle_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*validate) return cmd_validate(validate_model);
    if (*solve) return cmd_solve(solve_args);
    if (*equilibrium) return cmd_equilibrium(eq_args);
    if (*simulate) {
      sim_args.threads = threads;
      return cmd_simulate(sim_args);
    }
    if (*verify) return cmd_verify(verify_models, verify_seed, threads, verify_out);
    if (*oracle) {
      return cmd_oracle(oracle_model, oracle_filter, oracle_solver, oracle_horizon, oracle_depth,
                        oracle_out);
    }
  } catch (const mfg::ConfigError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInputError;
  } catch (const mfg::NodeBudgetExceeded& e) {
    std::fprintf(stderr, "resource limit: %s\n", e.what());
    return kResourceLimit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kViolation;
  }
  return kOk;
}
