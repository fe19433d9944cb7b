#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mfg/filter.h"
#include "mfg/measure_flow.h"
#include "mfg/model.h"

namespace mfg {

enum class TerminalMode { zero, tail_upper };

struct SolveOptions {
  int horizon = 0;
  TerminalMode terminal = TerminalMode::zero;
  double prune_eps = kDefaultPruneEps;
  double quantum = 1e-9;
  double tie_eps = 1e-9;
  std::size_t node_budget = 5'000'000;
};

class NodeBudgetExceeded : public std::runtime_error {
 public:
  NodeBudgetExceeded(std::size_t budget, int depth_reached);
  int depth_reached() const { return depth_; }

 private:
  int depth_;
};

/// Time index plus belief weights rounded to a fixed quantum.
struct BeliefKey {
  int time = 0;
  std::vector<std::int64_t> cells;
  bool operator==(const BeliefKey&) const = default;
};

struct BeliefKeyHash {
  std::size_t operator()(const BeliefKey& k) const noexcept;
};

BeliefKey make_key(const Belief& z, double quantum);

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct TreeNode {
  Belief belief;
  BeliefKey key;
  // Indexed by a * num_obs + y. Leaves (time T+1) have no children.
  std::vector<NodeId> child;
  std::vector<double> obs_prob;
  std::vector<double> stage_cost;   // C_t(z, a)
  std::vector<double> pruned_mass;  // per action
};

/// Reachable beliefs of the belief-state MDP for one flow, built layer by
/// layer from z_0 = mu_0 over every action, with nodes merged by BeliefKey.
class BeliefTree {
 public:
  static BeliefTree build(const GameModel& model, const MeasureFlow& flow,
                          const SolveOptions& options);

  int horizon() const { return horizon_; }
  std::size_t num_actions() const { return num_actions_; }
  std::size_t num_obs() const { return num_obs_; }
  std::size_t num_states() const { return num_states_; }
  double discount() const { return discount_; }
  double cost_bound() const { return cost_bound_; }
  std::uint64_t flow_tag() const { return flow_tag_; }
  const MeasureFlow& flow() const { return flow_; }
  const SolveOptions& options() const { return options_; }

  std::size_t size() const { return nodes_.size(); }
  NodeId root() const { return 0; }
  const TreeNode& node(NodeId id) const { return nodes_[id]; }
  // Node ids at depth t, t = 0..T+1, in creation order.
  const std::vector<NodeId>& layer(int t) const { return layers_[static_cast<std::size_t>(t)]; }
  bool is_leaf(NodeId id) const { return nodes_[id].belief.time > horizon_; }
  NodeId child(NodeId id, std::size_t a, std::size_t y) const {
    return nodes_[id].child[a * num_obs_ + y];
  }

  std::optional<NodeId> find(const BeliefKey& key) const;
  // Node at depth t closest to `weights` in L1.
  NodeId nearest(int t, std::span<const double> weights) const;

 private:
  int horizon_ = 0;
  std::size_t num_actions_ = 0, num_obs_ = 0, num_states_ = 0;
  double discount_ = 0.0;
  double cost_bound_ = 0.0;
  std::uint64_t flow_tag_ = 0;
  MeasureFlow flow_;
  SolveOptions options_;
  std::vector<TreeNode> nodes_;
  std::vector<std::vector<NodeId>> layers_;
  std::unordered_map<BeliefKey, NodeId, BeliefKeyHash> index_;
};

/// Per-node optimal values J*_t and q-values. Leaves carry the terminal value only.
struct ValueTable {
  std::vector<double> value;
  std::vector<std::vector<double>> q;
  std::vector<std::vector<std::size_t>> argmin;
};

/// Deterministic Markov selector on the nodes of one belief tree.
struct Policy {
  std::shared_ptr<const BeliefTree> tree;
  std::vector<int> action;  // -1 where undefined (always at leaves)

  int horizon() const { return tree->horizon(); }
  std::uint64_t flow_tag() const { return tree->flow_tag(); }
  int at(NodeId id) const { return action[id]; }

  static Policy from_selector(std::shared_ptr<const BeliefTree> tree,
                              const std::function<int(NodeId)>& select);
};

struct BackupResult {
  double value = 0.0;
  std::vector<double> q;
  std::vector<std::size_t> argmin;
};

// q(a) = C_t(z,a) + beta sum_y H(y|z,a) V(F(z,a,y)); `values` indexed by node id.
BackupResult bellman_backup(const BeliefTree& tree, NodeId id, std::span<const double> values,
                            double tie_eps);

double terminal_value(const BeliefTree& tree, TerminalMode mode);

struct Solution {
  std::shared_ptr<const BeliefTree> tree;
  ValueTable values;
  Policy policy;

  double root_value() const { return values.value[tree->root()]; }
};

Solution solve_pomdp(const GameModel& model, const MeasureFlow& flow, const SolveOptions& options);
Solution solve_on_tree(std::shared_ptr<const BeliefTree> tree, TerminalMode terminal);

// Probability of reaching each node when `policy` is followed from the root.
std::vector<double> node_weights(const Policy& policy);

// Max over nodes with weight > 1e-12 (under the policy) of q(chosen) - min_a q(a).
double optimality_residual(const Policy& policy, const ValueTable& values);

// Expected discounted cost of following `policy` through its own tree.
double evaluate_policy(const Policy& policy, TerminalMode terminal = TerminalMode::zero);
// Same, after checking that `flow` is the flow the policy's tree was built on.
double evaluate_policy(const GameModel& model, const Policy& policy, const MeasureFlow& flow,
                       int horizon);

}  // namespace mfg
