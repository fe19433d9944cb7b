#include "mfg/filter.h"

#include <string>

namespace mfg {

namespace {

void renormalize(std::vector<double>& w) {
  double s = 0.0;
  for (double& v : w) {
    if (v < 0.0) v = 0.0;
    s += v;
  }
  for (double& v : w) v /= s;
}

}  // namespace

Belief predict(const Belief& z, std::size_t a, const StageKernels& at_t) {
  const std::size_t nx = at_t.num_states;
  Belief out{z.time + 1, std::vector<double>(nx, 0.0)};
  for (std::size_t x = 0; x < nx; ++x) {
    const double zx = z.weights[x];
    if (zx == 0.0) continue;
    auto row = at_t.transition_row(x, a);
    for (std::size_t xn = 0; xn < nx; ++xn) out.weights[xn] += zx * row[xn];
  }
  renormalize(out.weights);
  return out;
}

Belief predict(const GameModel& model, const Belief& z, std::size_t a, const Measure& mu_t) {
  const std::size_t nx = model.num_states();
  Belief out{z.time + 1, std::vector<double>(nx, 0.0)};
  std::vector<double> row(nx);
  for (std::size_t x = 0; x < nx; ++x) {
    if (z.weights[x] == 0.0) continue;
    model.transition(x, a, mu_t, row);
    for (std::size_t xn = 0; xn < nx; ++xn) out.weights[xn] += z.weights[x] * row[xn];
  }
  renormalize(out.weights);
  return out;
}

std::vector<double> observation_predictive(std::span<const double> predicted,
                                           const StageKernels& at_next) {
  std::vector<double> H(at_next.num_obs, 0.0);
  for (std::size_t x = 0; x < at_next.num_states; ++x) {
    const double zx = predicted[x];
    if (zx == 0.0) continue;
    auto row = at_next.observation_row(x);
    for (std::size_t y = 0; y < at_next.num_obs; ++y) H[y] += zx * row[y];
  }
  return H;
}

std::vector<double> observation_predictive(const GameModel& model, const Belief& z, std::size_t a,
                                           const Measure& mu_t, const Measure& mu_next) {
  const Belief zhat = predict(model, z, a, mu_t);
  std::vector<double> H(model.num_obs(), 0.0);
  std::vector<double> row(model.num_obs());
  for (std::size_t x = 0; x < model.num_states(); ++x) {
    if (zhat.weights[x] == 0.0) continue;
    model.observation(x, mu_next, row);
    for (std::size_t y = 0; y < row.size(); ++y) H[y] += zhat.weights[x] * row[y];
  }
  return H;
}

Belief correct(const Belief& predicted, std::size_t y, double predictive_prob,
               const StageKernels& at_next, double prune_eps) {
  if (!(predictive_prob > prune_eps)) {
    throw ZeroProbabilityBranch("bayes update on observation " + std::to_string(y) +
                                " with predictive probability below the pruning threshold");
  }
  Belief out{predicted.time, std::vector<double>(at_next.num_states)};
  for (std::size_t x = 0; x < at_next.num_states; ++x) {
    out.weights[x] = predicted.weights[x] * at_next.observation_row(x)[y] / predictive_prob;
  }
  renormalize(out.weights);
  return out;
}

Belief bayes_update(const Belief& z, std::size_t a, std::size_t y, const StageKernels& at_t,
                    const StageKernels& at_next, double prune_eps) {
  const Belief zhat = predict(z, a, at_t);
  const auto H = observation_predictive(zhat.weights, at_next);
  return correct(zhat, y, H[y], at_next, prune_eps);
}

Belief bayes_update(const GameModel& model, const Belief& z, std::size_t a, std::size_t y,
                    const Measure& mu_t, const Measure& mu_next, double prune_eps) {
  const Belief zhat = predict(model, z, a, mu_t);
  std::vector<double> row(model.num_obs());
  std::vector<double> joint(model.num_states());
  double H = 0.0;
  for (std::size_t x = 0; x < model.num_states(); ++x) {
    model.observation(x, mu_next, row);
    joint[x] = zhat.weights[x] * row[y];
    H += joint[x];
  }
  if (!(H > prune_eps)) {
    throw ZeroProbabilityBranch("bayes update on observation " + std::to_string(y) +
                                " with predictive probability below the pruning threshold");
  }
  for (double& v : joint) v /= H;
  renormalize(joint);
  return Belief{zhat.time, std::move(joint)};
}

BeliefTransition belief_kernel(const Belief& z, std::size_t a, const StageKernels& at_t,
                               const StageKernels& at_next, double prune_eps) {
  const Belief zhat = predict(z, a, at_t);
  const auto H = observation_predictive(zhat.weights, at_next);
  BeliefTransition out;
  for (std::size_t y = 0; y < H.size(); ++y) {
    if (H[y] > prune_eps) {
      out.children.push_back({y, H[y], correct(zhat, y, H[y], at_next, prune_eps)});
    } else {
      out.pruned_mass += H[y];
    }
  }
  return out;
}

BeliefTransition belief_kernel(const GameModel& model, const Belief& z, std::size_t a,
                               const Measure& mu_t, const Measure& mu_next, double prune_eps) {
  return belief_kernel(z, a, model.stage(mu_t), model.stage(mu_next), prune_eps);
}

double belief_cost(const Belief& z, std::size_t a, const StageKernels& at_t) {
  double c = 0.0;
  for (std::size_t x = 0; x < at_t.num_states; ++x) c += z.weights[x] * at_t.cost_at(x, a);
  return c;
}

double belief_cost(const GameModel& model, const Belief& z, std::size_t a, const Measure& mu_t) {
  double c = 0.0;
  for (std::size_t x = 0; x < model.num_states(); ++x) {
    if (z.weights[x] != 0.0) c += z.weights[x] * model.cost(x, a, mu_t);
  }
  return c;
}

}  // namespace mfg
