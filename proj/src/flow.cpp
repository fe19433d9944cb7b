#include "mfg/flow.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfg {

namespace {

double moment_of(const std::vector<double>& w, const std::vector<double>& z) {
  double s = 0.0;
  for (std::size_t x = 0; x < z.size(); ++x) s += w[x] * z[x];
  return s;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double d : v) m = std::max(m, d);
  return m;
}

}  // namespace

std::vector<WeightedBelief> StateActionFlow::beliefs_at(int t) const {
  std::vector<WeightedBelief> out;
  for (const auto& n : depths[static_cast<std::size_t>(t)]) out.push_back({n.weight, &belief(n)});
  return out;
}

StateActionFlow state_action_flow(const Policy& policy) {
  const auto w = node_weights(policy);
  const auto& tree = *policy.tree;
  StateActionFlow out;
  out.tree = policy.tree;
  out.depths.resize(static_cast<std::size_t>(tree.horizon()) + 2);
  out.pruned_mass.assign(out.depths.size(), 0.0);
  for (int t = 0; t <= tree.horizon() + 1; ++t) {
    double total = 0.0;
    for (NodeId id : tree.layer(t)) {
      if (w[id] <= 0.0) continue;
      out.depths[static_cast<std::size_t>(t)].push_back({id, w[id], policy.at(id)});
      total += w[id];
    }
    out.pruned_mass[static_cast<std::size_t>(t)] = std::max(0.0, 1.0 - total);
  }
  return out;
}

Measure barycenter(const std::vector<WeightedBelief>& nodes) {
  if (nodes.empty()) throw std::invalid_argument("barycenter of an empty node set");
  std::vector<double> out(nodes.front().belief->weights.size(), 0.0);
  double total = 0.0;
  for (const auto& n : nodes) {
    total += n.weight;
    for (std::size_t x = 0; x < out.size(); ++x) out[x] += n.weight * n.belief->weights[x];
  }
  for (double& v : out) v /= total;
  return Measure(std::move(out), 1e-9);
}

MeasureFlow induced_flow(const GameModel& model, const Policy& policy,
                         const MeasureFlow& filter_flow) {
  if (filter_flow.tag() != policy.flow_tag()) {
    throw std::invalid_argument("induced_flow: policy was not solved against the filter flow");
  }
  return induced_flow(model, policy);
}

MeasureFlow induced_flow(const GameModel& model, const Policy& policy) {
  const auto sa = state_action_flow(policy);
  const std::size_t nx = model.num_states();
  std::vector<Measure> out{model.initial()};
  std::vector<double> row(nx);
  for (int t = 0; t <= policy.horizon(); ++t) {
    const Measure& mu_t = out.back();
    std::vector<double> next(nx, 0.0);
    double total = 0.0;
    for (const auto& n : sa.depths[static_cast<std::size_t>(t)]) {
      if (n.action < 0) throw std::invalid_argument("induced_flow: policy missing a reachable node");
      total += n.weight;
      const auto& z = sa.belief(n).weights;
      for (std::size_t x = 0; x < nx; ++x) {
        const double m = n.weight * z[x];
        if (m == 0.0) continue;
        model.transition(x, static_cast<std::size_t>(n.action), mu_t, row);
        for (std::size_t xn = 0; xn < nx; ++xn) next[xn] += m * row[xn];
      }
    }
    for (double& v : next) v /= total;
    out.push_back(Measure(std::move(next), 1e-9));
  }
  return MeasureFlow(std::move(out));
}

double ConsistencyReport::max_barycenter_gap() const { return max_of(barycenter_gap); }
double ConsistencyReport::max_two_formula_gap() const { return max_of(two_formula_gap); }
double ConsistencyReport::max_weight_defect() const { return max_of(weight_defect); }

ConsistencyReport consistency_identities(const GameModel& model, const Policy& policy) {
  const auto sa = state_action_flow(policy);
  const auto lambda = induced_flow(model, policy);
  const auto& tree = *policy.tree;
  const auto kernels = flow_kernels(model, tree.flow());
  const std::size_t nx = model.num_states(), ny = model.num_obs();

  ConsistencyReport rep;
  for (int t = 0; t <= tree.horizon() + 1; ++t) {
    const auto& nodes = sa.depths[static_cast<std::size_t>(t)];
    double total = sa.pruned_mass[static_cast<std::size_t>(t)];
    for (const auto& n : nodes) total += n.weight;
    rep.weight_defect.push_back(std::abs(total - 1.0));

    const Measure bary = barycenter(sa.beliefs_at(t));
    double gap = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      gap = std::max(gap, std::abs(bary[x] - lambda[static_cast<std::size_t>(t)][x]));
    }
    rep.barycenter_gap.push_back(gap);

    if (t > tree.horizon()) continue;
    std::vector<double> via_kernel(nx, 0.0), via_children(nx, 0.0);
    const auto& at_t = kernels[static_cast<std::size_t>(t)];
    for (const auto& n : nodes) {
      const auto a = static_cast<std::size_t>(n.action);
      const auto& z = sa.belief(n).weights;
      for (std::size_t x = 0; x < nx; ++x) {
        auto row = at_t.transition_row(x, a);
        for (std::size_t xn = 0; xn < nx; ++xn) via_kernel[xn] += n.weight * z[x] * row[xn];
      }
      const auto& tn = tree.node(n.node);
      for (std::size_t y = 0; y < ny; ++y) {
        const NodeId c = tn.child[a * ny + y];
        if (c == kNoNode) continue;
        const double wc = n.weight * tn.obs_prob[a * ny + y];
        const auto& zc = tree.node(c).belief.weights;
        for (std::size_t xn = 0; xn < nx; ++xn) via_children[xn] += wc * zc[xn];
      }
    }
    double g2 = 0.0;
    for (std::size_t x = 0; x < nx; ++x) g2 = std::max(g2, std::abs(via_kernel[x] - via_children[x]));
    rep.two_formula_gap.push_back(g2);
  }
  return rep;
}

MomentReport moment_check(const GameModel& model, const StateActionFlow& flow, double tol_disc) {
  const auto& w = model.moment_weights();
  const double alpha = model.moment_alpha();
  const double M = model.moment_mass();
  const auto& tree = *flow.tree;
  const std::size_t ny = tree.num_obs();

  MomentReport rep;
  rep.tol_disc = tol_disc;
  for (std::size_t t = 0; t < flow.depths.size(); ++t) {
    double mass = 0.0, total = 0.0, worst = 0.0;
    for (const auto& n : flow.depths[t]) {
      const auto& z = flow.belief(n).weights;
      const double Wz = moment_of(w, z);
      mass += n.weight * Wz;
      total += n.weight;
      if (n.action < 0) continue;
      const auto a = static_cast<std::size_t>(n.action);
      const auto& tn = tree.node(n.node);
      double next = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        const NodeId c = tn.child[a * ny + y];
        if (c != kNoNode) next += tn.obs_prob[a * ny + y] * moment_of(w, tree.node(c).belief.weights);
      }
      const double ratio = Wz > 0.0 ? next / (alpha * Wz) : (next > 0.0 ? INFINITY : 0.0);
      worst = std::max(worst, ratio);
      if (ratio > 1.0 + tol_disc) {
        std::ostringstream os;
        os.precision(12);
        os << "depth " << t << " node " << n.node << ": one-step moment ratio " << ratio;
        rep.violations.push_back(os.str());
      }
    }
    mass /= total;
    const double bound = std::pow(alpha, static_cast<double>(t)) * M;
    rep.w_mass.push_back(mass);
    rep.depth_bound.push_back(bound);
    rep.worst_step_ratio.push_back(worst);
    if (mass > std::pow(1.0 + tol_disc, static_cast<double>(t)) * bound) {
      std::ostringstream os;
      os.precision(12);
      os << "depth " << t << ": W-mass " << mass << " exceeds compounded bound";
      rep.violations.push_back(os.str());
    }
  }
  return rep;
}

}  // namespace mfg
