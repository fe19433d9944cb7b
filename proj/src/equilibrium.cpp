#include "mfg/equilibrium.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfg {

double EquilibriumConfig::step(int iteration) const {
  if (damping == DampingMode::fictitious_play) return 1.0 / static_cast<double>(iteration + 1);
  return lambda;
}

void EquilibriumConfig::check() const {
  if (damping == DampingMode::constant && !(lambda > 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("equilibrium: damping must lie in (0,1]");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("equilibrium: tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("equilibrium: max_iters must be at least 1");
}

double nce_residual(const MeasureFlow& a, const MeasureFlow& b) {
  if (a.size() != b.size()) throw std::invalid_argument("nce_residual: horizon mismatch");
  double r = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    r = std::max(r, l1_distance(a[t].weights(), b[t].weights()));
  }
  return r;
}

namespace {

MeasureFlow mix(const MeasureFlow& current, const MeasureFlow& target, double step) {
  std::vector<Measure> out;
  out.reserve(current.size());
  out.push_back(current[0]);
  for (std::size_t t = 1; t < current.size(); ++t) {
    std::vector<double> w(current[t].size());
    double s = 0.0;
    for (std::size_t x = 0; x < w.size(); ++x) {
      w[x] = (1.0 - step) * current[t][x] + step * target[t][x];
      s += w[x];
    }
    for (double& v : w) v /= s;
    out.push_back(Measure(std::move(w), 1e-9));
  }
  return MeasureFlow(std::move(out));
}

}  // namespace

EquilibriumReport find_equilibrium(const GameModel& model, const EquilibriumConfig& config) {
  config.check();
  const int T = config.solve.horizon;
  MeasureFlow mu = config.initial_guess.value_or(MeasureFlow::constant(model.initial(), T));
  if (mu.horizon() != T) throw std::invalid_argument("equilibrium: initial guess has wrong horizon");
  if (!(mu[0] == model.initial())) {
    throw std::invalid_argument("equilibrium: initial guess must start at the model's mu_0");
  }

  EquilibriumReport best;
  bool have_best = false;
  for (int k = 0; k < config.max_iters; ++k) {
    Solution sol = solve_pomdp(model, mu, config.solve);
    MeasureFlow lambda = induced_flow(model, sol.policy);
    const double r = nce_residual(mu, lambda);
    best.residual_history.push_back(r);
    if (!have_best || r < best.residual) {
      have_best = true;
      best.flow = mu;
      best.policy = sol.policy;
      best.values = std::move(sol.values);
      best.induced = lambda;
      best.residual = r;
      best.best_iteration = k;
    }
    best.iterations = k + 1;
    if (r <= config.tol) {
      best.converged = true;
      break;
    }
    mu = mix(mu, lambda, config.step(k));
  }

  best.optimality_residual = optimality_residual(best.policy, best.values);
  SolveOptions lower = config.solve, upper = config.solve;
  lower.terminal = TerminalMode::zero;
  upper.terminal = TerminalMode::tail_upper;
  best.value_lower = solve_on_tree(best.policy.tree, lower.terminal).root_value();
  best.value_upper = solve_on_tree(best.policy.tree, upper.terminal).root_value();
  return best;
}

double monotonicity_diagnostic(const GameModel& model, const StateActionFlow& a,
                               const StateActionFlow& b, int horizon) {
  const double beta = model.discount();
  double total = 0.0;
  double discount = 1.0;
  for (int t = 0; t <= horizon; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const Measure mu_a = barycenter(a.beliefs_at(t));
    const Measure mu_b = barycenter(b.beliefs_at(t));
    const auto ka = model.stage(mu_a);
    const auto kb = model.stage(mu_b);
    auto integrate = [&](const StateActionFlow& f, double sign) {
      double s = 0.0;
      for (const auto& n : f.depths[ts]) {
        const auto act = static_cast<std::size_t>(n.action);
        const auto& z = f.belief(n);
        s += n.weight * (belief_cost(z, act, ka) - belief_cost(z, act, kb));
      }
      return sign * s;
    };
    total += discount * (integrate(a, 1.0) + integrate(b, -1.0));
    discount *= beta;
  }
  return total;
}

}  // namespace mfg
