#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "mfg/measure_flow.h"
#include "mfg/model.h"

// Brute-force reference computations. Everything here works directly from the
// model's kernels by enumerating state paths or observation histories and
// shares no code with the filter, the solver or the flow module.
namespace mfg::oracle {

using History = std::vector<std::size_t>;  // observations y(1..t)
using HistoryPolicy = std::function<std::size_t(int t, const History& h)>;

struct Conditional {
  std::vector<double> posterior;  // P(x_t | y_1..y_t) under actions a_0..a_{t-1}
  double evidence = 0.0;          // P(y_1..y_t)
};

// Sums the joint law over every state path x_0..x_t.
Conditional exact_conditional(const GameModel& model, const MeasureFlow& flow,
                              const std::vector<std::size_t>& actions,
                              const std::vector<std::size_t>& observations);

// Expected discounted cost of a deterministic history policy over t = 0..T
// (no terminal value), via the unnormalized joint over (state, history).
double evaluate_history_policy(const GameModel& model, const MeasureFlow& flow, int horizon,
                               const HistoryPolicy& policy);

struct ExhaustiveResult {
  double minimum = 0.0;
  std::size_t policies = 0;  // |A|^(number of decision points)
};

// Minimum over all deterministic observation-history policies. Refuses
// instances with more than 2^22 policies.
ExhaustiveResult exhaustive_policy_minimum(const GameModel& model, const MeasureFlow& flow,
                                           int horizon);

// Optimal q-values per reachable history (normalized by P(h)), by backward
// recursion over histories with unnormalized joint measures.
struct HistoryQ {
  std::map<History, std::vector<double>> q;
  std::map<History, double> probability;
};
HistoryQ history_q_values(const GameModel& model, const MeasureFlow& flow, int horizon);

// Largest q(h, pi(h)) - min_a q(h, a) over histories reached by `policy` with
// probability > 1e-12.
double max_q_gap(const GameModel& model, const MeasureFlow& flow, int horizon,
                 const HistoryPolicy& policy);

// Lambda(pi) for a history policy, each transition evaluated at the output's own entry.
MeasureFlow induced_flow_exact(const GameModel& model, int horizon, const HistoryPolicy& policy);

// E|k/N - p| for k ~ Binomial(N, p).
double binomial_mean_abs_deviation(int N, double p);

}  // namespace mfg::oracle
