#include <gtest/gtest.h>

#include <cmath>

#include "mfg/acceptance.h"
#include "mfg/equilibrium.h"
#include "mfg/flow.h"
#include "mfg/oracle.h"
#include "support.h"

using namespace mfg;
using namespace mfg::testing;

namespace {

EquilibriumConfig config(int T, double lambda = 1.0, int max_iters = 200, double tol = 1e-10) {
  EquilibriumConfig c;
  c.lambda = lambda;
  c.max_iters = max_iters;
  c.tol = tol;
  c.solve.horizon = T;
  return c;
}

// Action a steers toward state a; cost `weight * mu(x)` penalizes crowded states.
std::shared_ptr<const TabularAffineModel> crowd_model(double weight) {
  Tensor K({2, 2, 2, 2}), d({2, 2, 2}), r({2, 2});
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t xb = 0; xb < 2; ++xb) {
        K({x, a, xb, a}) = 0.9;
        K({x, a, xb, 1 - a}) = 0.1;
        d({x, a, xb}) = x == xb ? weight : 0.0;
      }
    }
    r({x, x}) = 0.8;
    r({x, 1 - x}) = 0.2;
  }
  return build_tabular(K, d, r, 0.9, Measure({0.7, 0.3}));
}

}  // namespace

TEST(Equilibrium, DecoupledConvergesInOneIteration) {
  const auto m = bundled("decoupled");
  const auto rep = find_equilibrium(*m, config(4));
  EXPECT_TRUE(rep.converged);
  ASSERT_GE(rep.residual_history.size(), 2u);
  EXPECT_LE(rep.residual_history[1], 1e-12);
  EXPECT_LE(rep.optimality_residual, 1e-9);
  EXPECT_LE(rep.value_lower, rep.value_upper);
}

TEST(Equilibrium, UncontrolledDynamicsGiveMarkovMarginals) {
  const Matrix P{{0.7, 0.3}, {0.4, 0.6}};
  const auto m = decoupled_model({P, P}, {{1.0, 2.0}, {0.5, 0.1}}, {{0.9, 0.1}, {0.2, 0.8}}, 0.9,
                                 {0.6, 0.4});
  const auto rep = find_equilibrium(*m, config(5));
  ASSERT_TRUE(rep.converged);
  std::vector<double> mu = m->initial().vec();
  for (std::size_t t = 0; t < rep.flow.size(); ++t) {
    EXPECT_LT(max_abs_diff(rep.flow[t].vec(), mu), 1e-12) << "t=" << t;
    mu = {mu[0] * P[0][0] + mu[1] * P[1][0], mu[0] * P[0][1] + mu[1] * P[1][1]};
  }
}

TEST(Equilibrium, ConvergedReportSatisfiesBothHalves) {
  const auto m = bundled("coupled_toy");
  const auto rep = find_equilibrium(*m, config(2, 1.0, 200, 1e-6));
  ASSERT_TRUE(rep.converged);
  EXPECT_LE(nce_residual(rep.flow, induced_flow(*m, rep.policy)), 1e-6);
  EXPECT_LE(rep.optimality_residual, 1e-9);
  EXPECT_EQ(rep.residual, rep.residual_history[static_cast<std::size_t>(rep.best_iteration)]);
}

TEST(Equilibrium, NonConvergenceIsReportedNotThrown) {
  const auto m = crowd_model(5.0);
  const auto rep = find_equilibrium(*m, config(3, 1.0, 6));
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.residual_history.size(), 6u);
  EXPECT_EQ(rep.residual, *std::min_element(rep.residual_history.begin(), rep.residual_history.end()));
}

TEST(Equilibrium, DampedIteratesStayInSimplex) {
  const auto m = crowd_model(5.0);
  for (auto mode : {DampingMode::constant, DampingMode::fictitious_play}) {
    for (int iters : {1, 2, 5, 17}) {
      auto c = config(3, 0.3, iters);
      c.damping = mode;
      const auto rep = find_equilibrium(*m, c);
      for (const auto& mu : rep.flow.measures()) {
        double s = 0.0;
        for (double v : mu.vec()) {
          EXPECT_GE(v, 0.0);
          s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
      EXPECT_EQ(rep.flow[0].vec(), m->initial().vec());
    }
  }
}

TEST(Equilibrium, ConfigChecks) {
  auto c = config(2, 0.0);
  EXPECT_ANY_THROW(c.check());
  c = config(2, 1.5);
  EXPECT_ANY_THROW(c.check());
  c = config(2, 0.5, 10, 0.0);
  EXPECT_ANY_THROW(c.check());
  c = config(2);
  c.damping = DampingMode::fictitious_play;
  EXPECT_DOUBLE_EQ(c.step(0), 1.0);
  EXPECT_DOUBLE_EQ(c.step(3), 0.25);
}

TEST(Equilibrium, NceResidualExamples) {
  const auto m = bundled("coupled_toy");
  const MeasureFlow a = MeasureFlow::recursive_from_initial(*m, 3);
  EXPECT_EQ(nce_residual(a, a), 0.0);
  std::vector<Measure> ms = a.measures();
  auto w = ms[3].vec();
  w[0] -= 0.1;
  w[1] += 0.1;
  ms[3] = Measure(w);
  EXPECT_NEAR(nce_residual(a, MeasureFlow(ms)), 0.2, 1e-15);
  EXPECT_THROW(nce_residual(a, MeasureFlow::recursive_from_initial(*m, 2)), std::invalid_argument);

  acceptance::Uniform u(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = acceptance::random_flow(u, Measure::uniform(4), 3);
    const auto g = acceptance::random_flow(u, Measure::uniform(4), 3);
    double direct = 0.0;
    for (std::size_t t = 0; t < f.size(); ++t) {
      double s = 0.0;
      for (std::size_t x = 0; x < 4; ++x) s += std::abs(f[t][x] - g[t][x]);
      direct = std::max(direct, s);
    }
    EXPECT_NEAR(nce_residual(f, g), direct, 1e-15);
  }
}

TEST(Equilibrium, MonotonicityExamples) {
  SolveOptions o;
  o.horizon = 3;

  // Identical flows.
  const auto toy = bundled("coupled_toy");
  const auto sol = solve_pomdp(*toy, MeasureFlow::recursive_from_initial(*toy, 3), o);
  const auto sa = state_action_flow(sol.policy);
  EXPECT_EQ(monotonicity_diagnostic(*toy, sa, sa, 3), 0.0);

  // Measure-free cost.
  const auto dec = bundled("decoupled");
  const auto s1 = solve_pomdp(*dec, MeasureFlow::recursive_from_initial(*dec, 3), o);
  const auto alt = Policy::from_selector(s1.tree, [](NodeId id) { return static_cast<int>(id % 2); });
  EXPECT_NEAR(monotonicity_diagnostic(*dec, state_action_flow(s1.policy), state_action_flow(alt), 3),
              0.0, 1e-15);

  // c(x,a,mu) = mu(x) with measure-free dynamics: the sum collapses to
  // sum_t beta^t ||mu_a,t - mu_b,t||_2^2, with the marginals from history enumeration.
  const auto crowd = crowd_model(1.0);
  const MeasureFlow flat = MeasureFlow::constant(crowd->initial(), 3);
  const auto sc = solve_pomdp(*crowd, flat, o);
  const auto stay = Policy::from_selector(sc.tree, [](NodeId) { return 0; });
  const auto mix = Policy::from_selector(sc.tree, [](NodeId id) { return static_cast<int>(id % 2); });
  for (const Policy* other : {&stay, &mix}) {
    const auto ma = oracle::induced_flow_exact(*crowd, 3, history_policy(sc.policy));
    const auto mb = oracle::induced_flow_exact(*crowd, 3, history_policy(*other));
    double expect = 0.0;
    for (int t = 0; t <= 3; ++t) {
      double sq = 0.0;
      for (std::size_t x = 0; x < 2; ++x) sq += std::pow(ma[t][x] - mb[t][x], 2);
      expect += std::pow(0.9, t) * sq;
    }
    const double got = monotonicity_diagnostic(*crowd, state_action_flow(sc.policy),
                                               state_action_flow(*other), 3);
    EXPECT_NEAR(got, expect, 1e-12);
    EXPECT_GE(got, 0.0);
  }
}
