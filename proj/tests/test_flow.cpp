#include <gtest/gtest.h>

#include <cmath>

#include "mfg/acceptance.h"
#include "mfg/equilibrium.h"
#include "mfg/flow.h"
#include "mfg/oracle.h"
#include "mfg/solver.h"
#include "support.h"

using namespace mfg;
using namespace mfg::testing;

namespace {

Solution solve_at(const GameModel& m, const MeasureFlow& flow, int T) {
  SolveOptions o;
  o.horizon = T;
  return solve_pomdp(m, flow, o);
}

const Matrix kR = {{0.8, 0.2}, {0.3, 0.7}};
const Matrix kC = {{1.0, 0.2}, {0.0, 0.9}};

}  // namespace

TEST(Flow, IdentityTransitionKeepsInitialMeasure) {
  const auto m = decoupled_model({identity(2), identity(2)}, kC, kR, 0.9, {0.6, 0.4});
  const auto sol = solve_at(*m, MeasureFlow::constant(m->initial(), 4), 4);
  const MeasureFlow out = induced_flow(*m, sol.policy);
  for (const auto& mu : out.measures()) EXPECT_LT(max_abs_diff(mu.vec(), m->initial().vec()), 1e-15);
}

TEST(Flow, FixedKernelMixesInOneStep) {
  const std::vector<double> eta{0.25, 0.75};
  const Matrix fixed{eta, eta};
  const auto m = decoupled_model({fixed, fixed}, kC, kR, 0.9, {0.6, 0.4});
  const auto sol = solve_at(*m, MeasureFlow::constant(m->initial(), 3), 3);
  const MeasureFlow out = induced_flow(*m, sol.policy);
  EXPECT_EQ(out[0].vec(), m->initial().vec());
  for (std::size_t t = 1; t < out.size(); ++t) EXPECT_LT(max_abs_diff(out[t].vec(), eta), 1e-15);
}

TEST(Flow, DecoupledFirstStepByHand) {
  const auto m = bundled("decoupled");
  const auto flow = MeasureFlow::recursive_from_initial(*m, 3);
  const auto sol = solve_at(*m, flow, 3);
  const auto a = static_cast<std::size_t>(sol.policy.at(sol.tree->root()));
  std::vector<double> hand(2, 0.0);
  for (std::size_t x = 0; x < 2; ++x) {
    const auto p = m->transition(x, a, m->initial());
    for (std::size_t xn = 0; xn < 2; ++xn) hand[xn] += m->initial()[x] * p[xn];
  }
  const MeasureFlow out = induced_flow(*m, sol.policy);
  EXPECT_LT(max_abs_diff(out[1].vec(), hand), 1e-15);
  const auto sa = state_action_flow(sol.policy);
  EXPECT_LT(max_abs_diff(barycenter(sa.beliefs_at(1)).vec(), hand), 1e-12);
}

TEST(Flow, BarycenterExamples) {
  const Belief z{0, {0.2, 0.5, 0.3}};
  EXPECT_EQ(barycenter({{1.0, &z}}).vec(), z.weights);
  const Belief d0{1, {1.0, 0.0}}, d1{1, {0.0, 1.0}};
  const Measure b = barycenter({{0.3, &d0}, {0.7, &d1}});
  EXPECT_NEAR(b[0], 0.3, 1e-15);
  EXPECT_NEAR(b[1], 0.7, 1e-15);
}

TEST(Flow, StateActionFlowAtDepthZero) {
  const auto m = bundled("coupled_toy");
  const auto sol = solve_at(*m, MeasureFlow::recursive_from_initial(*m, 2), 2);
  const auto sa = state_action_flow(sol.policy);
  ASSERT_EQ(sa.depths[0].size(), 1u);
  EXPECT_EQ(sa.depths[0][0].weight, 1.0);
  EXPECT_EQ(sa.depths[0][0].action, sol.policy.at(sol.tree->root()));
  EXPECT_EQ(sa.belief(sa.depths[0][0]).weights, m->initial().vec());
}

TEST(Flow, UninformativeSensorOneNodePerDepth) {
  const auto m = decoupled_model({{{0.9, 0.1}, {0.2, 0.8}}, {{0.4, 0.6}, {0.7, 0.3}}}, kC,
                                 {{0.5, 0.5}, {0.5, 0.5}}, 0.9, {0.6, 0.4});
  const auto sol = solve_at(*m, MeasureFlow::constant(m->initial(), 5), 5);
  const auto sa = state_action_flow(sol.policy);
  for (const auto& d : sa.depths) EXPECT_EQ(d.size(), 1u);
}

TEST(Flow, DepthTwoWeightsAreProductsOfPredictives) {
  const auto m = bundled("coupled_toy");
  const auto flow = MeasureFlow::recursive_from_initial(*m, 2);
  const auto sol = solve_at(*m, flow, 2);
  const auto sa = state_action_flow(sol.policy);
  ASSERT_LE(sa.depths[2].size(), 4u);

  // Hand filter along every observation pair, directly from the kernels.
  auto step = [&](const std::vector<double>& z, std::size_t a, int t, std::size_t y,
                  double& h) {
    std::vector<double> joint(2, 0.0);
    for (std::size_t x = 0; x < 2; ++x) {
      const auto p = m->transition(x, a, flow[t]);
      for (std::size_t xn = 0; xn < 2; ++xn) {
        joint[xn] += z[x] * p[xn] * m->observation(xn, flow[t + 1])[y];
      }
    }
    h = joint[0] + joint[1];
    return std::vector<double>{joint[0] / h, joint[1] / h};
  };
  const BeliefTree& tree = *sol.tree;
  const auto a0 = static_cast<std::size_t>(sol.policy.at(tree.root()));
  std::vector<double> expected_weights;
  for (std::size_t y1 = 0; y1 < 2; ++y1) {
    double h1 = 0.0;
    const auto z1 = step(m->initial().vec(), a0, 0, y1, h1);
    const auto a1 = static_cast<std::size_t>(sol.policy.at(tree.child(tree.root(), a0, y1)));
    for (std::size_t y2 = 0; y2 < 2; ++y2) {
      double h2 = 0.0;
      step(z1, a1, 1, y2, h2);
      expected_weights.push_back(h1 * h2);
    }
  }
  double total = 0.0;
  for (const auto& n : sa.depths[2]) {
    total += n.weight;
    // Each node weight is one product or a sum of merged products.
    bool found = false;
    for (double w : expected_weights) found = found || std::abs(w - n.weight) < 1e-12;
    if (!found) {
      double s = 0.0;
      for (double w : expected_weights) s += w;
      EXPECT_LE(n.weight, s + 1e-12);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  if (sa.depths[2].size() == 4) {
    std::vector<double> got;
    for (const auto& n : sa.depths[2]) got.push_back(n.weight);
    std::sort(got.begin(), got.end());
    std::sort(expected_weights.begin(), expected_weights.end());
    EXPECT_LT(max_abs_diff(got, expected_weights), 1e-12);
  }
}

TEST(Flow, MomentCheckWithUnitWeights) {
  acceptance::Uniform u(21);
  const auto m = acceptance::random_tabular(u, 3, 2, 2, true);
  const auto sol = solve_at(*m, acceptance::random_flow(u, m->initial(), 4), 4);
  const auto rep = moment_check(*m, state_action_flow(sol.policy));
  EXPECT_TRUE(rep.violations.empty());
  for (double w : rep.w_mass) EXPECT_NEAR(w, 1.0, 1e-12);
}

TEST(Flow, MomentCheckIdentityKernel) {
  const auto m = decoupled_model({identity(2), identity(2)}, kC, kR, 0.9, {0.6, 0.4},
                                 std::vector<double>{1.0, 5.0}, 1.0);
  const auto sol = solve_at(*m, MeasureFlow::constant(m->initial(), 4), 4);
  const auto rep = moment_check(*m, state_action_flow(sol.policy));
  EXPECT_TRUE(rep.violations.empty());
  for (double w : rep.w_mass) EXPECT_NEAR(w, 0.6 + 5.0 * 0.4, 1e-12);
}

TEST(Flow, GaussianMomentSlack) {
  const auto m = bundled("gaussian");
  const auto sol = solve_at(*m, MeasureFlow::recursive_from_initial(*m, 3), 3);
  const auto rep = moment_check(*m, state_action_flow(sol.policy));
  EXPECT_TRUE(rep.violations.empty());
  for (std::size_t t = 0; t < rep.w_mass.size(); ++t) {
    EXPECT_LE(rep.w_mass[t], std::pow(1.05, static_cast<double>(t)) * rep.depth_bound[t]);
    EXPECT_LE(rep.worst_step_ratio[t], 1.05);
  }
}

TEST(FlowProperty, IdentitiesHoldOnRandomModels) {
  acceptance::Uniform u(22);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = acceptance::random_tabular(u, 2 + u.index(3), 1 + u.index(3), 2, true);
    const int T = 1 + static_cast<int>(u.index(3));
    const auto flow = acceptance::random_flow(u, m->initial(), T);
    const auto sol = solve_at(*m, flow, T);
    const auto rep = consistency_identities(*m, sol.policy);
    EXPECT_LE(rep.max_weight_defect(), 1e-10);
    EXPECT_LE(rep.max_two_formula_gap(), 1e-10);

    // The barycenter of each depth is the filter-flow marginal, which the
    // enumeration oracle recomputes when the policy is replayed on histories.
    const auto sa = state_action_flow(sol.policy);
    const MeasureFlow lam = induced_flow(*m, sol.policy);
    EXPECT_EQ(lam[0].vec(), m->initial().vec());
    for (std::size_t t = 0; t < lam.size(); ++t) {
      double s = 0.0;
      for (double v : lam[t].vec()) s += v;
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
    double total = 0.0;
    for (const auto& n : sa.depths[static_cast<std::size_t>(T)]) total += n.weight;
    EXPECT_NEAR(total + sa.pruned_mass[static_cast<std::size_t>(T)], 1.0, 1e-10);
  }
}

TEST(FlowProperty, InducedFlowMatchesHistoryEnumeration) {
  // The tree carries beliefs and weights formed under the filter flow, the
  // enumeration forms them under the output flow. They coincide for every t
  // when p is measure-free, and up to t = 2 in general (depth-1 weights only
  // involve mu_0 and the measure-free r).
  acceptance::Uniform u(23);
  for (int trial = 0; trial < 40; ++trial) {
    const bool coupled = trial % 2 == 1;
    const auto m = acceptance::random_tabular(u, 2 + u.index(2), 2, 2, coupled);
    const auto flow = acceptance::random_flow(u, m->initial(), 3);
    const auto sol = solve_at(*m, flow, 3);
    const MeasureFlow lam = induced_flow(*m, sol.policy);
    const MeasureFlow exact = oracle::induced_flow_exact(*m, 3, history_policy(sol.policy));
    const std::size_t upto = coupled ? 3 : lam.size();
    for (std::size_t t = 0; t < upto; ++t) {
      EXPECT_LT(max_abs_diff(lam[t].vec(), exact[t].vec()), 1e-10) << "t=" << t;
    }
  }
}

TEST(FlowProperty, BarycenterMatchesLambdaOnConsistentRuns) {
  for (const char* name : {"decoupled", "coupled_toy"}) {
    const auto m = bundled(name);
    const int T = std::string(name) == "coupled_toy" ? 2 : 3;
    EquilibriumConfig c;
    c.tol = 1e-12;
    c.solve.horizon = T;
    const auto eq = find_equilibrium(*m, c);
    ASSERT_TRUE(eq.converged) << name;
    const auto sa = state_action_flow(eq.policy);
    const MeasureFlow lam = induced_flow(*m, eq.policy);
    for (int t = 0; t <= T + 1; ++t) {
      EXPECT_LT(max_abs_diff(barycenter(sa.beliefs_at(t)).vec(), lam[t].vec()), 1e-10)
          << name << " t=" << t;
      EXPECT_LT(max_abs_diff(lam[t].vec(), eq.flow[t].vec()), 1e-10) << name << " t=" << t;
    }
  }
}
