#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "mfg/model.h"

namespace mfg {

/// Posterior over the state grid at time `time`.
struct Belief {
  int time = 0;
  std::vector<double> weights;
};

/// Raised when a Bayes update is requested on an observation whose
/// predictive probability does not exceed the pruning threshold.
class ZeroProbabilityBranch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BeliefChild {
  std::size_t observation;
  double probability;
  Belief belief;
};

/// Finitely supported belief transition: one child per retained observation.
struct BeliefTransition {
  std::vector<BeliefChild> children;
  double pruned_mass = 0.0;
};

inline constexpr double kDefaultPruneEps = 1e-12;

// The filter uses the transition kernel at mu_t and the observation kernel at
// mu_{t+1}. The StageKernels overloads are the hot path; the model overloads
// evaluate the needed rows on the fly.

Belief predict(const Belief& z, std::size_t a, const StageKernels& at_t);
Belief predict(const GameModel& model, const Belief& z, std::size_t a, const Measure& mu_t);

std::vector<double> observation_predictive(std::span<const double> predicted,
                                           const StageKernels& at_next);
std::vector<double> observation_predictive(const GameModel& model, const Belief& z, std::size_t a,
                                           const Measure& mu_t, const Measure& mu_next);

// Bayes correction of an already predicted belief.
Belief correct(const Belief& predicted, std::size_t y, double predictive_prob,
               const StageKernels& at_next, double prune_eps = kDefaultPruneEps);

Belief bayes_update(const Belief& z, std::size_t a, std::size_t y, const StageKernels& at_t,
                    const StageKernels& at_next, double prune_eps = kDefaultPruneEps);
Belief bayes_update(const GameModel& model, const Belief& z, std::size_t a, std::size_t y,
                    const Measure& mu_t, const Measure& mu_next,
                    double prune_eps = kDefaultPruneEps);

BeliefTransition belief_kernel(const Belief& z, std::size_t a, const StageKernels& at_t,
                               const StageKernels& at_next, double prune_eps = kDefaultPruneEps);
BeliefTransition belief_kernel(const GameModel& model, const Belief& z, std::size_t a,
                               const Measure& mu_t, const Measure& mu_next,
                               double prune_eps = kDefaultPruneEps);

// Lifted one-stage cost sum_x z(x) c(x,a,mu_t).
double belief_cost(const Belief& z, std::size_t a, const StageKernels& at_t);
double belief_cost(const GameModel& model, const Belief& z, std::size_t a, const Measure& mu_t);

}  // namespace mfg
