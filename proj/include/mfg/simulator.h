#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfg/measure_flow.h"
#include "mfg/model.h"
#include "mfg/solver.h"

namespace mfg {

struct SimConfig {
  int N = 1;
  int reps = 1;
  int horizon = 0;
  std::uint64_t seed = 0;
  // Worker threads; 0 means MFG_THREADS from the environment, else 1.
  // Affects speed only.
  int threads = 0;
  // Substream id of each agent slot; empty means slot i uses stream i.
  // Slot 0 is always the tagged agent whose cost is reported.
  std::vector<std::uint64_t> agent_streams;

  void check() const;
  int resolved_threads() const;
};

struct CostEstimate {
  double mean = 0.0;
  double se = 0.0;
};

/// Finite-N cost of agent 1 under the shared policy.
struct SimulationReport {
  CostEstimate J;
  double tail_bracket = 0.0;  // true cost lies in [J, J + tail_bracket] in expectation
  std::vector<double> per_rep_cost;
  // Empirical measures e_0..e_T of replication 0.
  std::vector<std::vector<double>> empirical_trace;
  std::size_t fallback_count = 0;
  std::size_t decision_count = 0;
  double fallback_fraction() const;
  bool fallback_flagged() const { return fallback_fraction() > 0.01; }
  std::uint64_t seed = 0;
  std::string splitting_rule;
};

/// Paired comparison of agent 1 following `deviant` versus the shared policy,
/// both runs driven by the same substreams.
struct DeviationReport {
  CostEstimate shared;
  CostEstimate deviant;
  CostEstimate gap;  // shared - deviant, paired
  std::vector<double> per_rep_deviant;
  std::size_t fallback_count = 0;
};

struct NamedPolicy {
  std::string name;
  Policy policy;
};

struct EpsPoint {
  int N = 0;
  double eps_hat = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::string best_deviation;
  std::vector<CostEstimate> gaps;  // per deviation, same order as the input set
};

struct TestFunction {
  std::string id;
  std::vector<double> values;  // one per state
};

struct ConvergenceRow {
  int t = 0;
  int N = 0;
  std::string f_id;
  double estimate = 0.0;
  double se = 0.0;
};

struct OneStepRow {
  int t = 0;  // compares e_{t+1} with the one-step prediction from e_t
  int N = 0;
  std::string g_id;
  double estimate = 0.0;
  double se = 0.0;
  double bound = 0.0;  // 2 |g| / sqrt(N)
  bool holds() const { return estimate <= bound + 3.0 * se; }
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::vector<OneStepRow> one_step;
};

inline constexpr double kConfidenceZ = 1.96;

SimulationReport simulate_shared(const GameModel& model, const Policy& policy,
                                 const SimConfig& config);

DeviationReport simulate_deviation(const GameModel& model, const Policy& shared,
                                   const Policy& deviant, const SimConfig& config);

// Candidate deviations: best response to the flow, best responses to two
// perturbed flows, myopic greedy, and uniformly random selectors.
std::vector<NamedPolicy> default_deviations(const GameModel& model, const MeasureFlow& flow,
                                            const SolveOptions& options, std::uint64_t seed,
                                            double perturbation = 0.1);

// eps_hat(N) = max over deviations of max(0, J_shared - J_deviant); a lower
// bound on the true epsilon, since only finitely many deviations are tried.
std::vector<EpsPoint> estimate_eps(const GameModel& model, const Policy& policy,
                                   const std::vector<NamedPolicy>& deviations,
                                   const SimConfig& config, const std::vector<int>& Ns);

ConvergenceTable empirical_convergence(const GameModel& model, const Policy& policy,
                                       const MeasureFlow& flow, const SimConfig& config,
                                       const std::vector<int>& Ns,
                                       const std::vector<TestFunction>& functions);

}  // namespace mfg
