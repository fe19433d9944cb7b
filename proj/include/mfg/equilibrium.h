#pragma once

#include <optional>
#include <vector>

#include "mfg/flow.h"
#include "mfg/measure_flow.h"
#include "mfg/solver.h"

namespace mfg {

enum class DampingMode { constant, fictitious_play };

struct EquilibriumConfig {
  DampingMode damping = DampingMode::constant;
  double lambda = 1.0;  // constant mode only; 0 < lambda <= 1
  double tol = 1e-6;
  int max_iters = 500;
  SolveOptions solve;  // horizon, terminal mode, tie/prune/quantum settings
  std::optional<MeasureFlow> initial_guess;  // defaults to the constant flow at mu_0

  double step(int iteration) const;
  void check() const;
};

/// Best candidate (pi, mu) of the NCE iteration and its diagnostics.
struct EquilibriumReport {
  MeasureFlow flow;
  Policy policy;
  ValueTable values;
  MeasureFlow induced;  // Lambda(policy)
  std::vector<double> residual_history;
  double residual = 0.0;
  double optimality_residual = 0.0;
  double value_lower = 0.0;  // root value, terminal value zero
  double value_upper = 0.0;  // root value, terminal value |c|/(1-beta)
  bool converged = false;
  int iterations = 0;
  int best_iteration = 0;
};

// sup_t || mu_a,t - mu_b,t ||_1
double nce_residual(const MeasureFlow& a, const MeasureFlow& b);

// Damped Picard iteration mu^{k+1} = (1 - l_k) mu^k + l_k Lambda(solve(mu^k)).
// Never throws on non-convergence; returns the smallest-residual candidate.
EquilibriumReport find_equilibrium(const GameModel& model, const EquilibriumConfig& config);

// Truncated sum_t beta^t int (C^a_t - C^b_t) d(nu_a,t - nu_b,t), with C^a the
// lifted cost under the barycenter flow of `a`. Nonnegative means the
// monotonicity condition holds for this pair.
double monotonicity_diagnostic(const GameModel& model, const StateActionFlow& a,
                               const StateActionFlow& b, int horizon);

}  // namespace mfg
