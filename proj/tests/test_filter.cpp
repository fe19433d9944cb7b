#include <gtest/gtest.h>

#include <numeric>

#include "mfg/acceptance.h"
#include "mfg/filter.h"
#include "mfg/measure_flow.h"
#include "mfg/oracle.h"
#include "support.h"

using namespace mfg;
using namespace mfg::testing;

namespace {

// One action; p[x][x'], r[x][y], c[x].
StageKernels kernels(const Matrix& p, const Matrix& r, std::vector<double> c = {}) {
  StageKernels k;
  k.num_states = p.size();
  k.num_obs = r[0].size();
  k.num_actions = 1;
  for (const auto& row : p) k.transition.insert(k.transition.end(), row.begin(), row.end());
  for (const auto& row : r) k.observation.insert(k.observation.end(), row.begin(), row.end());
  k.cost = c.empty() ? std::vector<double>(p.size(), 0.0) : std::move(c);
  return k;
}

const Matrix kP = {{0.9, 0.1}, {0.2, 0.8}};
const Matrix kR = {{0.7, 0.3}, {0.4, 0.6}};
const Belief kHalf{0, {0.5, 0.5}};

}  // namespace

TEST(Filter, PredictExamples) {
  const auto k = kernels(kP, kR);
  const Belief zh = predict(kHalf, 0, k);
  EXPECT_EQ(zh.time, 1);
  EXPECT_NEAR(zh.weights[0], 0.55, 1e-15);
  EXPECT_NEAR(zh.weights[1], 0.45, 1e-15);

  const auto id = kernels(identity(2), kR);
  EXPECT_EQ(predict(Belief{0, {0.3, 0.7}}, 0, id).weights, (std::vector<double>{0.3, 0.7}));
  EXPECT_EQ(predict(Belief{0, {0.0, 1.0}}, 0, k).weights, kP[1]);
}

TEST(Filter, ObservationPredictiveExamples) {
  const std::vector<double> zh{0.55, 0.45};
  const auto H = observation_predictive(zh, kernels(kP, kR));
  EXPECT_NEAR(H[0], 0.565, 1e-15);
  EXPECT_NEAR(H[1], 0.435, 1e-15);

  const auto flat = observation_predictive(zh, kernels(kP, {{1.0 / 3, 1.0 / 3, 1.0 / 3},
                                                            {1.0 / 3, 1.0 / 3, 1.0 / 3}}));
  for (double h : flat) EXPECT_NEAR(h, 1.0 / 3, 1e-15);
  EXPECT_EQ(observation_predictive(zh, kernels(kP, identity(2))), zh);
}

TEST(Filter, BayesUpdateExamples) {
  const auto k = kernels(kP, kR);
  const Belief z = bayes_update(kHalf, 0, 0, k, k);
  EXPECT_NEAR(z.weights[0], 0.385 / 0.565, 1e-12);
  EXPECT_NEAR(z.weights[1], 0.18 / 0.565, 1e-12);
  EXPECT_NEAR(z.weights[0], 0.681416, 1e-6);

  const auto flat = kernels(kP, {{0.5, 0.5}, {0.5, 0.5}});
  for (std::size_t y = 0; y < 2; ++y) {
    EXPECT_LT(max_abs_diff(bayes_update(kHalf, 0, y, flat, flat).weights, {0.55, 0.45}), 1e-15);
  }
  const auto perfect = kernels(kP, identity(2));
  EXPECT_EQ(bayes_update(kHalf, 0, 1, perfect, perfect).weights, (std::vector<double>{0.0, 1.0}));
}

TEST(Filter, BayesUpdateOnImpossibleObservationThrows) {
  const auto perfect = kernels(identity(2), identity(2));
  EXPECT_THROW(bayes_update(Belief{0, {1.0, 0.0}}, 0, 1, perfect, perfect), ZeroProbabilityBranch);
}

TEST(Filter, BeliefKernelExamples) {
  const auto k = kernels(kP, kR);
  const auto bt = belief_kernel(kHalf, 0, k, k);
  ASSERT_EQ(bt.children.size(), 2u);
  EXPECT_NEAR(bt.children[0].probability, 0.565, 1e-15);
  EXPECT_NEAR(bt.children[1].probability, 0.435, 1e-15);
  EXPECT_LT(max_abs_diff(bt.children[0].belief.weights, {0.385 / 0.565, 0.18 / 0.565}), 1e-12);
  EXPECT_LT(max_abs_diff(bt.children[1].belief.weights, {0.165 / 0.435, 0.27 / 0.435}), 1e-12);

  const auto single = kernels(kP, {{1.0}, {1.0}});
  const auto one = belief_kernel(kHalf, 0, single, single);
  ASSERT_EQ(one.children.size(), 1u);
  EXPECT_EQ(one.children[0].probability, 1.0);
  EXPECT_LT(max_abs_diff(one.children[0].belief.weights, {0.55, 0.45}), 1e-15);

  const auto perfect = kernels(kP, identity(2));
  const auto two = belief_kernel(kHalf, 0, perfect, perfect);
  ASSERT_EQ(two.children.size(), 2u);
  EXPECT_NEAR(two.children[0].probability, 0.55, 1e-15);
  EXPECT_EQ(two.children[0].belief.weights, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(two.children[1].belief.weights, (std::vector<double>{0.0, 1.0}));
}

TEST(Filter, BeliefKernelPrunesImpossibleBranches) {
  const auto perfect = kernels(identity(2), identity(2));
  const auto bt = belief_kernel(Belief{0, {1.0, 0.0}}, 0, perfect, perfect);
  ASSERT_EQ(bt.children.size(), 1u);
  EXPECT_EQ(bt.children[0].observation, 0u);
  EXPECT_LE(bt.pruned_mass, 2 * kDefaultPruneEps);
}

TEST(Filter, BeliefCostExamples) {
  const auto k = kernels(kP, kR, {4.0, 8.0});
  EXPECT_DOUBLE_EQ(belief_cost(Belief{0, {0.25, 0.75}}, 0, k), 7.0);
  EXPECT_EQ(belief_cost(Belief{0, {0.0, 1.0}}, 0, k), 8.0);
  const auto ones = kernels(kP, kR, {1.0, 1.0});
  EXPECT_DOUBLE_EQ(belief_cost(Belief{0, {0.3, 0.7}}, 0, ones), 1.0);
}

TEST(Filter, TimingUsesTransitionAtTAndObservationAtNext) {
  // The model overloads must take p from mu_t and r from mu_{t+1}.
  const auto model = bundled("coupled_toy");
  acceptance::Uniform u(5);
  const Measure a(acceptance::random_distribution(u, 2), 1e-9);
  const Measure b(acceptance::random_distribution(u, 2), 1e-9);
  const auto ka = model->stage(a), kb = model->stage(b);
  const Belief z{0, {0.3, 0.7}};
  EXPECT_EQ(bayes_update(*model, z, 1, 0, a, b).weights, bayes_update(z, 1, 0, ka, kb).weights);
  EXPECT_EQ(predict(*model, z, 1, a).weights, predict(z, 1, ka).weights);
}

TEST(FilterProperty, TotalProbabilityIdentity) {
  acceptance::Uniform u(404);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nx = 2 + u.index(4), ny = 1 + u.index(4), na = 1 + u.index(3);
    const auto m = acceptance::random_tabular(u, nx, ny, na, true);
    const Measure mt(acceptance::random_distribution(u, nx, 0.0), 1e-9);
    const Measure mn(acceptance::random_distribution(u, nx, 0.0), 1e-9);
    const Belief z{0, acceptance::random_distribution(u, nx, 0.0)};
    const std::size_t a = u.index(na);
    const auto kt = m->stage(mt), kn = m->stage(mn);
    const Belief zh = predict(z, a, kt);
    const auto bt = belief_kernel(z, a, kt, kn);
    std::vector<double> mix(nx, 0.0);
    double total = bt.pruned_mass;
    for (const auto& c : bt.children) {
      total += c.probability;
      for (std::size_t x = 0; x < nx; ++x) mix[x] += c.probability * c.belief.weights[x];
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
    EXPECT_LT(max_abs_diff(mix, zh.weights), 1e-10);
  }
}

TEST(FilterProperty, MatchesJointEnumeration) {
  acceptance::Uniform u(505);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nx = 2 + u.index(2), ny = 1 + u.index(2), na = 1 + u.index(2);
    const auto m = acceptance::random_tabular(u, nx, ny, na, true);
    const MeasureFlow flow = acceptance::random_flow(u, m->initial(), 5);
    const auto ks = flow_kernels(*m, flow);
    for (int len = 0; len <= 5; ++len) {
      std::vector<std::size_t> as, ys;
      Belief z{0, m->initial().vec()};
      for (int t = 0; t < len; ++t) {
        as.push_back(u.index(na));
        ys.push_back(u.index(ny));
        z = bayes_update(z, as.back(), ys.back(), ks[t], ks[t + 1]);
      }
      const auto exact = oracle::exact_conditional(*m, flow, as, ys);
      EXPECT_LT(max_abs_diff(z.weights, exact.posterior), 1e-10);
    }
  }
}

TEST(FilterProperty, BeliefsStayInSimplex) {
  acceptance::Uniform u(606);
  const auto m = acceptance::random_tabular(u, 4, 3, 2, true);
  const auto k = m->stage(m->initial());
  Belief z{0, m->initial().vec()};
  for (int t = 0; t < 10000; ++t) {
    const auto H = observation_predictive(predict(z, t % 2, k).weights, k);
    std::size_t y = u.index(3);
    while (H[y] <= kDefaultPruneEps) y = (y + 1) % 3;
    z = bayes_update(z, t % 2, y, k, k);
    double s = 0.0;
    for (double v : z.weights) {
      ASSERT_GE(v, 0.0);
      s += v;
    }
    ASSERT_NEAR(s, 1.0, 1e-12);
  }
}
