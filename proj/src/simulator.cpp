#include "mfg/simulator.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "mfg/filter.h"
#include "mfg/rng.h"

namespace mfg {

namespace rng {

std::size_t sample_discrete(std::span<const double> probs, double u) {
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace rng

void SimConfig::check() const {
  if (N < 1) throw std::invalid_argument("simulation: N must be at least 1");
  if (reps < 1) throw std::invalid_argument("simulation: reps must be at least 1");
  if (horizon < 0) throw std::invalid_argument("simulation: horizon must be nonnegative");
  if (!agent_streams.empty() && agent_streams.size() != static_cast<std::size_t>(N)) {
    throw std::invalid_argument("simulation: agent_streams must have one entry per agent");
  }
}

int SimConfig::resolved_threads() const {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("MFG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

double SimulationReport::fallback_fraction() const {
  return decision_count == 0 ? 0.0
                             : static_cast<double>(fallback_count) /
                                   static_cast<double>(decision_count);
}

namespace {

CostEstimate summarize(const std::vector<double>& xs) {
  CostEstimate e;
  const double n = static_cast<double>(xs.size());
  for (double v : xs) e.mean += v;
  e.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double v : xs) ss += (v - e.mean) * (v - e.mean);
    e.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

// Runs fn(rep) for rep = 0..reps-1 on `threads` workers and returns the
// results in replication order.
template <typename Fn>
auto parallel_reps(int reps, int threads, Fn fn) -> std::vector<decltype(fn(0))> {
  std::vector<decltype(fn(0))> out(static_cast<std::size_t>(reps));
  threads = std::max(1, std::min(threads, reps));
  if (threads == 1) {
    for (int r = 0; r < reps; ++r) out[static_cast<std::size_t>(r)] = fn(r);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int r = next++; r < reps; r = next++) {
        try {
          out[static_cast<std::size_t>(r)] = fn(r);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// A policy together with the kernels of the flow its agents filter along.
struct PolicyRunner {
  const Policy* policy = nullptr;
  std::vector<StageKernels> kernels;

  PolicyRunner(const GameModel& model, const Policy& p)
      : policy(&p), kernels(flow_kernels(model, p.tree->flow())) {}
};

struct Probe {
  const MeasureFlow* flow = nullptr;
  const std::vector<TestFunction>* functions = nullptr;
};

struct RepOutcome {
  double cost = 0.0;
  std::size_t fallbacks = 0;
  std::vector<double> deviation;  // [t * F + f]: |e_t(f) - mu_t(f)|
  std::vector<double> one_step;   // [t * F + f]: |e_{t+1}(f) - prediction from e_t|
  std::vector<std::vector<double>> empirical;  // replication 0 only
};

double integrate(std::span<const double> m, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t x = 0; x < m.size(); ++x) s += m[x] * f[x];
  return s;
}

class Engine {
 public:
  Engine(const GameModel& model, const SimConfig& cfg) : model_(model), cfg_(cfg) {
    cfg_.check();
    if (model.observation_depends_on_measure()) {
      throw std::invalid_argument(
          "simulation refused: the observation kernel depends on the mean-field term; agents "
          "filter with local observations only, which requires a measure-free r(y|x)");
    }
    const std::size_t nx = model.num_states(), ny = model.num_obs();
    obs_rows_.resize(nx * ny);
    for (std::size_t x = 0; x < nx; ++x) {
      model.observation(x, model.initial(), std::span<double>(obs_rows_.data() + x * ny, ny));
    }
  }

  void require_horizon(const Policy& p) const {
    if (p.horizon() < cfg_.horizon) {
      throw std::invalid_argument("simulation horizon exceeds the policy horizon");
    }
  }

  RepOutcome run(int rep, const PolicyRunner& shared, const PolicyRunner& tagged,
                 const Probe* probe) const {
    const std::size_t nx = model_.num_states(), na = model_.num_actions(), ny = model_.num_obs();
    const auto N = static_cast<std::size_t>(cfg_.N);
    const int T = cfg_.horizon;
    const auto r = static_cast<std::uint64_t>(rep);
    const std::size_t F = probe ? probe->functions->size() : 0;

    RepOutcome out;
    if (probe) {
      out.deviation.assign(static_cast<std::size_t>(T + 1) * F, 0.0);
      out.one_step.assign(static_cast<std::size_t>(T) * F, 0.0);
    }

    std::vector<std::size_t> x(N), a(N);
    std::vector<NodeId> node(N);
    std::vector<std::uint64_t> sid(N);
    for (std::size_t i = 0; i < N; ++i) {
      sid[i] = cfg_.agent_streams.empty() ? i : cfg_.agent_streams[i];
      const double u = rng::to_unit(rng::key(cfg_.seed, r, sid[i], 0, rng::Stream::initial));
      x[i] = rng::sample_discrete(model_.initial().weights(), u);
      node[i] = (i == 0 ? tagged : shared).policy->tree->root();
    }

    std::vector<double> counts(nx), emp(nx);
    std::vector<std::vector<double>> rows(nx * na);
    std::vector<double> prediction(F, 0.0);
    double discount = 1.0;

    for (int t = 0; t <= T; ++t) {
      std::fill(counts.begin(), counts.end(), 0.0);
      for (std::size_t i = 0; i < N; ++i) counts[x[i]] += 1.0;
      for (std::size_t s = 0; s < nx; ++s) emp[s] = counts[s] / static_cast<double>(N);
      const Measure e = Measure::unchecked(emp);
      if (rep == 0) out.empirical.push_back(emp);

      for (std::size_t i = 0; i < N; ++i) {
        const int act = (i == 0 ? tagged : shared).policy->at(node[i]);
        if (act < 0) throw std::logic_error("simulation: policy undefined at an agent's node");
        a[i] = static_cast<std::size_t>(act);
      }
      out.cost += discount * model_.cost(x[0], a[0], e);
      discount *= model_.discount();

      if (probe) {
        const auto& mu = (*probe->flow)[static_cast<std::size_t>(t)];
        for (std::size_t f = 0; f < F; ++f) {
          const auto& fv = (*probe->functions)[f].values;
          out.deviation[static_cast<std::size_t>(t) * F + f] =
              std::abs(integrate(emp, fv) - integrate(mu.weights(), fv));
          if (t > 0) {
            out.one_step[static_cast<std::size_t>(t - 1) * F + f] =
                std::abs(integrate(emp, fv) - prediction[f]);
          }
        }
      }
      if (t == T) break;

      for (auto& row : rows) row.clear();
      auto row_for = [&](std::size_t s, std::size_t act) -> const std::vector<double>& {
        auto& row = rows[s * na + act];
        if (row.empty()) row = model_.transition(s, act, e);
        return row;
      };

      if (probe) {
        std::fill(prediction.begin(), prediction.end(), 0.0);
        for (std::size_t i = 0; i < N; ++i) {
          const auto& row = row_for(x[i], a[i]);
          for (std::size_t f = 0; f < F; ++f) {
            prediction[f] += integrate(row, (*probe->functions)[f].values);
          }
        }
        for (double& p : prediction) p /= static_cast<double>(N);
      }

      const auto tu = static_cast<std::uint64_t>(t);
      for (std::size_t i = 0; i < N; ++i) {
        const double u = rng::to_unit(rng::key(cfg_.seed, r, sid[i], tu, rng::Stream::transition));
        const std::size_t xn = rng::sample_discrete(row_for(x[i], a[i]), u);
        const double v =
            rng::to_unit(rng::key(cfg_.seed, r, sid[i], tu + 1, rng::Stream::observation));
        const std::size_t y =
            rng::sample_discrete(std::span<const double>(obs_rows_.data() + xn * ny, ny), v);
        const PolicyRunner& runner = i == 0 ? tagged : shared;
        const BeliefTree& tree = *runner.policy->tree;
        NodeId next = tree.child(node[i], a[i], y);
        if (next == kNoNode) {
          next = off_tree(runner, node[i], a[i], y, t);
          if (i == 0 || &tagged == &shared) ++out.fallbacks;
        }
        node[i] = next;
        x[i] = xn;
      }
    }
    return out;
  }

 private:
  NodeId off_tree(const PolicyRunner& runner, NodeId from, std::size_t a, std::size_t y,
                  int t) const {
    const BeliefTree& tree = *runner.policy->tree;
    const auto& at_t = runner.kernels[static_cast<std::size_t>(t)];
    const auto& at_next = runner.kernels[static_cast<std::size_t>(t) + 1];
    const Belief zhat = predict(tree.node(from).belief, a, at_t);
    const auto H = observation_predictive(zhat.weights, at_next);
    Belief z = H[y] > 0.0 ? correct(zhat, y, H[y], at_next, 0.0) : zhat;
    return tree.nearest(t + 1, z.weights);
  }

  const GameModel& model_;
  SimConfig cfg_;
  std::vector<double> obs_rows_;
};

}  // namespace

SimulationReport simulate_shared(const GameModel& model, const Policy& policy,
                                 const SimConfig& config) {
  Engine engine(model, config);
  engine.require_horizon(policy);
  const PolicyRunner runner(model, policy);
  auto outcomes = parallel_reps(config.reps, config.resolved_threads(),
                                [&](int r) { return engine.run(r, runner, runner, nullptr); });
  SimulationReport rep;
  for (const auto& o : outcomes) {
    rep.per_rep_cost.push_back(o.cost);
    rep.fallback_count += o.fallbacks;
  }
  rep.J = summarize(rep.per_rep_cost);
  rep.empirical_trace = std::move(outcomes.front().empirical);
  const double beta = model.discount();
  rep.tail_bracket = std::pow(beta, config.horizon + 1) * model.cost_bound() / (1.0 - beta);
  rep.decision_count = static_cast<std::size_t>(config.reps) * static_cast<std::size_t>(config.N) *
                       static_cast<std::size_t>(config.horizon + 1);
  rep.seed = config.seed;
  rep.splitting_rule = rng::kSplittingRule;
  return rep;
}

DeviationReport simulate_deviation(const GameModel& model, const Policy& shared,
                                   const Policy& deviant, const SimConfig& config) {
  Engine engine(model, config);
  engine.require_horizon(shared);
  engine.require_horizon(deviant);
  const PolicyRunner s(model, shared), d(model, deviant);
  struct Pair {
    RepOutcome base, dev;
  };
  auto outcomes = parallel_reps(config.reps, config.resolved_threads(), [&](int r) {
    return Pair{engine.run(r, s, s, nullptr), engine.run(r, s, d, nullptr)};
  });
  DeviationReport rep;
  std::vector<double> base, gap;
  for (const auto& o : outcomes) {
    base.push_back(o.base.cost);
    rep.per_rep_deviant.push_back(o.dev.cost);
    gap.push_back(o.base.cost - o.dev.cost);
    rep.fallback_count += o.dev.fallbacks;
  }
  rep.shared = summarize(base);
  rep.deviant = summarize(rep.per_rep_deviant);
  rep.gap = summarize(gap);
  return rep;
}

std::vector<NamedPolicy> default_deviations(const GameModel& model, const MeasureFlow& flow,
                                            const SolveOptions& options, std::uint64_t seed,
                                            double perturbation) {
  std::vector<NamedPolicy> out;
  Solution best = solve_pomdp(model, flow, options);
  out.push_back({"best_response", best.policy});

  const std::size_t nx = model.num_states();
  for (std::size_t target : {std::size_t{0}, nx - 1}) {
    std::vector<Measure> shifted{flow[0]};
    for (std::size_t t = 1; t < flow.size(); ++t) {
      std::vector<double> w(nx);
      for (std::size_t x = 0; x < nx; ++x) {
        w[x] = (1.0 - perturbation) * flow[t][x] + (x == target ? perturbation : 0.0);
      }
      shifted.push_back(Measure(std::move(w), 1e-9));
    }
    Solution s = solve_pomdp(model, MeasureFlow(std::move(shifted)), options);
    out.push_back({"best_response_shift_" + std::to_string(target), s.policy});
  }

  const auto& tree = best.tree;
  out.push_back({"myopic", Policy::from_selector(tree, [&](NodeId id) {
                   const auto& c = tree->node(id).stage_cost;
                   return static_cast<int>(std::min_element(c.begin(), c.end()) - c.begin());
                 })});
  const auto na = static_cast<std::uint64_t>(model.num_actions());
  out.push_back({"uniform_random", Policy::from_selector(tree, [&](NodeId id) {
                   const auto bits = rng::key(seed, 0, id, 0, rng::Stream::policy);
                   return static_cast<int>(bits % na);
                 })});
  return out;
}

std::vector<EpsPoint> estimate_eps(const GameModel& model, const Policy& policy,
                                   const std::vector<NamedPolicy>& deviations,
                                   const SimConfig& config, const std::vector<int>& Ns) {
  if (deviations.empty()) throw std::invalid_argument("estimate_eps: empty deviation set");
  std::vector<EpsPoint> out;
  for (int N : Ns) {
    SimConfig cfg = config;
    cfg.N = N;
    cfg.agent_streams.clear();
    Engine engine(model, cfg);
    engine.require_horizon(policy);
    const PolicyRunner shared(model, policy);
    std::vector<PolicyRunner> runners;
    runners.reserve(deviations.size());
    for (const auto& d : deviations) {
      engine.require_horizon(d.policy);
      runners.emplace_back(model, d.policy);
    }
    auto outcomes = parallel_reps(cfg.reps, cfg.resolved_threads(), [&](int r) {
      std::vector<double> costs;
      costs.push_back(engine.run(r, shared, shared, nullptr).cost);
      for (const auto& d : runners) costs.push_back(engine.run(r, shared, d, nullptr).cost);
      return costs;
    });

    EpsPoint p;
    p.N = N;
    double best_mean = -INFINITY;
    for (std::size_t k = 0; k < deviations.size(); ++k) {
      std::vector<double> gap;
      for (const auto& o : outcomes) gap.push_back(o[0] - o[k + 1]);
      p.gaps.push_back(summarize(gap));
      if (p.gaps.back().mean > best_mean) {
        best_mean = p.gaps.back().mean;
        p.best_deviation = deviations[k].name;
        p.se = p.gaps.back().se;
      }
    }
    p.eps_hat = std::max(0.0, best_mean);
    p.ci_lo = std::max(0.0, best_mean - kConfidenceZ * p.se);
    p.ci_hi = std::max(0.0, best_mean + kConfidenceZ * p.se);
    out.push_back(std::move(p));
  }
  return out;
}

ConvergenceTable empirical_convergence(const GameModel& model, const Policy& policy,
                                       const MeasureFlow& flow, const SimConfig& config,
                                       const std::vector<int>& Ns,
                                       const std::vector<TestFunction>& functions) {
  if (flow.horizon() < config.horizon) {
    throw std::invalid_argument("empirical_convergence: flow shorter than the horizon");
  }
  ConvergenceTable table;
  const std::size_t F = functions.size();
  for (int N : Ns) {
    SimConfig cfg = config;
    cfg.N = N;
    cfg.agent_streams.clear();
    Engine engine(model, cfg);
    engine.require_horizon(policy);
    const PolicyRunner runner(model, policy);
    const Probe probe{&flow, &functions};
    auto outcomes = parallel_reps(cfg.reps, cfg.resolved_threads(),
                                  [&](int r) { return engine.run(r, runner, runner, &probe); });
    for (int t = 0; t <= cfg.horizon; ++t) {
      for (std::size_t f = 0; f < F; ++f) {
        std::vector<double> xs;
        for (const auto& o : outcomes) xs.push_back(o.deviation[static_cast<std::size_t>(t) * F + f]);
        const auto e = summarize(xs);
        table.rows.push_back({t, N, functions[f].id, e.mean, e.se});
      }
    }
    for (int t = 0; t < cfg.horizon; ++t) {
      for (std::size_t f = 0; f < F; ++f) {
        std::vector<double> xs;
        for (const auto& o : outcomes) xs.push_back(o.one_step[static_cast<std::size_t>(t) * F + f]);
        const auto e = summarize(xs);
        double sup = 0.0;
        for (double v : functions[f].values) sup = std::max(sup, std::abs(v));
        table.one_step.push_back(
            {t, N, functions[f].id, e.mean, e.se, 2.0 * sup / std::sqrt(static_cast<double>(N))});
      }
    }
  }
  return table;
}

}  // namespace mfg
