#include "mfg/solver.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace mfg {

NodeBudgetExceeded::NodeBudgetExceeded(std::size_t budget, int depth_reached)
    : std::runtime_error("belief tree exceeded the node budget of " + std::to_string(budget) +
                         " while expanding depth " + std::to_string(depth_reached)),
      depth_(depth_reached) {}

std::size_t BeliefKeyHash::operator()(const BeliefKey& k) const noexcept {
  std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(k.time);
  for (auto c : k.cells) {
    h ^= static_cast<std::uint64_t>(c) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

BeliefKey make_key(const Belief& z, double quantum) {
  BeliefKey k;
  k.time = z.time;
  k.cells.reserve(z.weights.size());
  for (double w : z.weights) k.cells.push_back(std::llround(w / quantum));
  return k;
}

BeliefTree BeliefTree::build(const GameModel& model, const MeasureFlow& flow,
                             const SolveOptions& options) {
  if (options.horizon < 0) throw std::invalid_argument("solve: horizon must be nonnegative");
  if (flow.horizon() < options.horizon) {
    throw std::invalid_argument("solve: flow must cover t = 0..horizon+1");
  }
  BeliefTree tree;
  tree.horizon_ = options.horizon;
  tree.num_actions_ = model.num_actions();
  tree.num_obs_ = model.num_obs();
  tree.num_states_ = model.num_states();
  tree.discount_ = model.discount();
  tree.cost_bound_ = model.cost_bound();
  tree.flow_ = flow;
  tree.flow_tag_ = flow.tag();
  tree.options_ = options;
  tree.layers_.resize(static_cast<std::size_t>(options.horizon) + 2);

  const auto kernels = flow_kernels(model, flow);
  const std::size_t na = tree.num_actions_, ny = tree.num_obs_;

  auto add_node = [&](Belief z, int depth) -> NodeId {
    BeliefKey key = make_key(z, options.quantum);
    if (auto it = tree.index_.find(key); it != tree.index_.end()) return it->second;
    if (tree.nodes_.size() >= options.node_budget) {
      throw NodeBudgetExceeded(options.node_budget, depth);
    }
    const auto id = static_cast<NodeId>(tree.nodes_.size());
    TreeNode n;
    n.belief = std::move(z);
    n.key = key;
    tree.nodes_.push_back(std::move(n));
    tree.index_.emplace(std::move(key), id);
    tree.layers_[static_cast<std::size_t>(depth)].push_back(id);
    return id;
  };

  add_node(Belief{0, model.initial().vec()}, 0);

  for (int t = 0; t <= options.horizon; ++t) {
    const auto& at_t = kernels[static_cast<std::size_t>(t)];
    const auto& at_next = kernels[static_cast<std::size_t>(t) + 1];
    // Copy: the layer below grows while this one is expanded.
    const std::vector<NodeId> current = tree.layers_[static_cast<std::size_t>(t)];
    for (NodeId id : current) {
      std::vector<NodeId> child(na * ny, kNoNode);
      std::vector<double> obs_prob(na * ny, 0.0);
      std::vector<double> stage_cost(na, 0.0);
      std::vector<double> pruned(na, 0.0);
      const Belief z = tree.nodes_[id].belief;
      for (std::size_t a = 0; a < na; ++a) {
        stage_cost[a] = belief_cost(z, a, at_t);
        const Belief zhat = predict(z, a, at_t);
        const auto H = observation_predictive(zhat.weights, at_next);
        for (std::size_t y = 0; y < ny; ++y) {
          obs_prob[a * ny + y] = H[y];
          if (H[y] > options.prune_eps) {
            child[a * ny + y] = add_node(correct(zhat, y, H[y], at_next, options.prune_eps), t + 1);
          } else {
            pruned[a] += H[y];
          }
        }
      }
      auto& n = tree.nodes_[id];
      n.child = std::move(child);
      n.obs_prob = std::move(obs_prob);
      n.stage_cost = std::move(stage_cost);
      n.pruned_mass = std::move(pruned);
    }
  }
  return tree;
}

std::optional<NodeId> BeliefTree::find(const BeliefKey& key) const {
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  return std::nullopt;
}

NodeId BeliefTree::nearest(int t, std::span<const double> weights) const {
  NodeId best = kNoNode;
  double best_d = std::numeric_limits<double>::infinity();
  for (NodeId id : layer(t)) {
    const double d = l1_distance(nodes_[id].belief.weights, weights);
    if (d < best_d) {
      best_d = d;
      best = id;
    }
  }
  return best;
}

Policy Policy::from_selector(std::shared_ptr<const BeliefTree> tree,
                             const std::function<int(NodeId)>& select) {
  Policy p;
  p.action.assign(tree->size(), -1);
  for (int t = 0; t <= tree->horizon(); ++t) {
    for (NodeId id : tree->layer(t)) p.action[id] = select(id);
  }
  p.tree = std::move(tree);
  return p;
}

BackupResult bellman_backup(const BeliefTree& tree, NodeId id, std::span<const double> values,
                            double tie_eps) {
  const auto& n = tree.node(id);
  if (n.child.empty()) throw std::logic_error("bellman_backup on a leaf node");
  const std::size_t na = tree.num_actions(), ny = tree.num_obs();
  BackupResult out;
  out.q.resize(na);
  for (std::size_t a = 0; a < na; ++a) {
    double cont = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      const NodeId c = n.child[a * ny + y];
      if (c == kNoNode) continue;
      if (c >= values.size()) throw std::logic_error("bellman_backup: missing child value");
      cont += n.obs_prob[a * ny + y] * values[c];
    }
    out.q[a] = n.stage_cost[a] + tree.discount() * cont;
  }
  out.value = *std::min_element(out.q.begin(), out.q.end());
  for (std::size_t a = 0; a < na; ++a) {
    if (out.q[a] <= out.value + tie_eps) out.argmin.push_back(a);
  }
  return out;
}

double terminal_value(const BeliefTree& tree, TerminalMode mode) {
  return mode == TerminalMode::zero ? 0.0 : tree.cost_bound() / (1.0 - tree.discount());
}

Solution solve_on_tree(std::shared_ptr<const BeliefTree> tree, TerminalMode terminal) {
  Solution s;
  const std::size_t n = tree->size();
  s.values.value.assign(n, 0.0);
  s.values.q.assign(n, {});
  s.values.argmin.assign(n, {});
  const double leaf = terminal_value(*tree, terminal);
  for (NodeId id : tree->layer(tree->horizon() + 1)) s.values.value[id] = leaf;
  for (int t = tree->horizon(); t >= 0; --t) {
    for (NodeId id : tree->layer(t)) {
      auto b = bellman_backup(*tree, id, s.values.value, tree->options().tie_eps);
      s.values.value[id] = b.value;
      s.values.q[id] = std::move(b.q);
      s.values.argmin[id] = std::move(b.argmin);
    }
  }
  s.policy = Policy::from_selector(tree, [&](NodeId id) {
    return static_cast<int>(s.values.argmin[id].front());
  });
  s.tree = std::move(tree);
  return s;
}

Solution solve_pomdp(const GameModel& model, const MeasureFlow& flow, const SolveOptions& options) {
  auto tree = std::make_shared<const BeliefTree>(BeliefTree::build(model, flow, options));
  return solve_on_tree(std::move(tree), options.terminal);
}

std::vector<double> node_weights(const Policy& policy) {
  const auto& tree = *policy.tree;
  std::vector<double> w(tree.size(), 0.0);
  w[tree.root()] = 1.0;
  const std::size_t ny = tree.num_obs();
  for (int t = 0; t <= tree.horizon(); ++t) {
    for (NodeId id : tree.layer(t)) {
      if (w[id] == 0.0) continue;
      const int a = policy.at(id);
      if (a < 0) throw std::invalid_argument("policy undefined at a reachable node");
      const auto& n = tree.node(id);
      for (std::size_t y = 0; y < ny; ++y) {
        const NodeId c = n.child[static_cast<std::size_t>(a) * ny + y];
        if (c != kNoNode) w[c] += w[id] * n.obs_prob[static_cast<std::size_t>(a) * ny + y];
      }
    }
  }
  return w;
}

double optimality_residual(const Policy& policy, const ValueTable& values) {
  const auto w = node_weights(policy);
  double gap = 0.0;
  for (int t = 0; t <= policy.horizon(); ++t) {
    for (NodeId id : policy.tree->layer(t)) {
      if (w[id] <= 1e-12) continue;
      const auto& q = values.q[id];
      const double best = *std::min_element(q.begin(), q.end());
      gap = std::max(gap, q[static_cast<std::size_t>(policy.at(id))] - best);
    }
  }
  return gap;
}

double evaluate_policy(const Policy& policy, TerminalMode terminal) {
  const auto& tree = *policy.tree;
  const std::size_t ny = tree.num_obs();
  std::vector<double> v(tree.size(), 0.0);
  const double leaf = terminal_value(tree, terminal);
  for (NodeId id : tree.layer(tree.horizon() + 1)) v[id] = leaf;
  // Only nodes reachable under the policy need an action.
  const auto w = node_weights(policy);
  for (int t = tree.horizon(); t >= 0; --t) {
    for (NodeId id : tree.layer(t)) {
      if (w[id] == 0.0) continue;
      const auto a = static_cast<std::size_t>(policy.at(id));
      const auto& n = tree.node(id);
      double cont = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        const NodeId c = n.child[a * ny + y];
        if (c != kNoNode) cont += n.obs_prob[a * ny + y] * v[c];
      }
      v[id] = n.stage_cost[a] + tree.discount() * cont;
    }
  }
  return v[tree.root()];
}

double evaluate_policy(const GameModel&, const Policy& policy, const MeasureFlow& flow,
                       int horizon) {
  if (flow.tag() != policy.flow_tag() || horizon != policy.horizon()) {
    throw std::invalid_argument("evaluate_policy: policy was not solved against this flow/horizon");
  }
  return evaluate_policy(policy, policy.tree->options().terminal);
}

}  // namespace mfg
