#pragma once

#include <string>
#include <vector>

#include "mfg/measure_flow.h"
#include "mfg/solver.h"

namespace mfg {

struct WeightedBelief {
  double weight;
  const Belief* belief;
};

struct StateActionNode {
  NodeId node;
  double weight;
  int action;  // -1 at depth T+1
};

/// Finitely supported state-action flow nu_t of a policy: the tree nodes the
/// policy reaches at each depth, with their probabilities and chosen actions.
struct StateActionFlow {
  std::shared_ptr<const BeliefTree> tree;
  std::vector<std::vector<StateActionNode>> depths;  // t = 0..T+1
  std::vector<double> pruned_mass;                   // per depth, cumulative

  const MeasureFlow& flow() const { return tree->flow(); }
  const Belief& belief(const StateActionNode& n) const { return tree->node(n.node).belief; }
  std::vector<WeightedBelief> beliefs_at(int t) const;
};

StateActionFlow state_action_flow(const Policy& policy);

// Mean measure sum_i w_i z_i, normalized by the total weight.
Measure barycenter(const std::vector<WeightedBelief>& nodes);

// Lambda(policy): forward pass over the policy's own tree (beliefs and weights
// formed under the flow the policy was solved against), with each step's
// transition evaluated at the output flow's own current entry.
MeasureFlow induced_flow(const GameModel& model, const Policy& policy);
MeasureFlow induced_flow(const GameModel& model, const Policy& policy,
                         const MeasureFlow& filter_flow);

struct ConsistencyReport {
  // max_x |B(nu_t)(x) - Lambda(policy)_t(x)| per depth.
  std::vector<double> barycenter_gap;
  // max_x |sum_nodes w sum_x z(x) p(.|x,a,mu_t) - sum_children w' z'| per depth t+1.
  std::vector<double> two_formula_gap;
  // Depth-wise node weight plus pruned mass, minus one.
  std::vector<double> weight_defect;

  double max_barycenter_gap() const;
  double max_two_formula_gap() const;
  double max_weight_defect() const;
};

ConsistencyReport consistency_identities(const GameModel& model, const Policy& policy);

struct MomentReport {
  std::vector<double> w_mass;       // sum_nodes w W(z) per depth
  std::vector<double> depth_bound;  // alpha^t M
  std::vector<double> worst_step_ratio;  // max over nodes of sum_y H W(child) / (alpha W(z))
  std::vector<std::string> violations;
  double tol_disc = 0.05;
};

MomentReport moment_check(const GameModel& model, const StateActionFlow& flow,
                          double tol_disc = 0.05);

}  // namespace mfg
