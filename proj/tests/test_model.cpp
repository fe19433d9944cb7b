#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mfg/acceptance.h"
#include "mfg/model.h"
#include "support.h"

using namespace mfg;
using namespace mfg::testing;

namespace {

Grid uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return Grid::with_coords(std::move(c), (hi - lo) / (n - 1));
}

// One action at 0, f(x,a,xbar) = f_scale * xbar + f_shift, g = sd, h(x) = x.
std::shared_ptr<const GaussianAdditiveModel> linear_gaussian(std::size_t n, double lo, double hi,
                                                             double f_scale, double f_shift,
                                                             double sd, std::size_t ny = 5) {
  GaussianTables t;
  t.states = uniform_grid(lo, hi, n);
  t.observations = uniform_grid(lo, hi, ny);
  t.actions = Grid::with_coords({0.0}, 1.0);
  t.f = Tensor({n, 1, n});
  t.g = Tensor({n, 1}, sd);
  t.h = Tensor({n, n});
  t.d = Tensor({n, 1, n}, 1.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t xb = 0; xb < n; ++xb) {
      t.f({x, 0, xb}) = f_scale * t.states.coords[xb] + f_shift;
      t.h({x, xb}) = t.states.coords[x];
    }
  }
  return build_gaussian(std::move(t), 0.9, Measure::uniform(n));
}

double mean_of(const Grid& g, const std::vector<double>& p) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) m += g.coords[i] * p[i];
  return m;
}

}  // namespace

TEST(Model, DiracCouplingReturnsTheSlice) {
  acceptance::Uniform u(7);
  const auto model = acceptance::random_tabular(u, 3, 2, 2, true);
  const Tensor& K = model->coupling_transition();
  for (std::size_t xb = 0; xb < 3; ++xb) {
    const Measure dirac = Measure::point_mass(3, xb);
    for (std::size_t x = 0; x < 3; ++x) {
      for (std::size_t a = 0; a < 2; ++a) {
        const auto p = model->transition(x, a, dirac);
        for (std::size_t xn = 0; xn < 3; ++xn) EXPECT_EQ(p[xn], (K({x, a, xb, xn})));
      }
    }
  }
}

TEST(Model, MeasureFreeKernelIgnoresMeasure) {
  const auto model = decoupled_model({{{0.9, 0.1}, {0.2, 0.8}}, {{0.5, 0.5}, {0.3, 0.7}}},
                                     {{1.0, 2.0}, {0.5, 0.0}}, {{0.8, 0.2}, {0.3, 0.7}}, 0.9,
                                     {0.6, 0.4});
  for (const auto& mu : simplex_mesh(2, 10)) {
    for (std::size_t x = 0; x < 2; ++x) {
      for (std::size_t a = 0; a < 2; ++a) {
        EXPECT_LT(max_abs_diff(model->transition(x, a, mu), model->transition(x, a, Measure::uniform(2))),
                  1e-15);
        EXPECT_NEAR(model->cost(x, a, mu), model->cost(x, a, Measure::uniform(2)), 1e-15);
      }
    }
  }
}

TEST(Model, HalfHalfMeasureAveragesSlices) {
  acceptance::Uniform u(11);
  const auto model = acceptance::random_tabular(u, 2, 2, 2, true);
  const Tensor& K = model->coupling_transition();
  const Tensor& d = model->coupling_cost();
  const Measure half({0.5, 0.5});
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t a = 0; a < 2; ++a) {
      const auto p = model->transition(x, a, half);
      for (std::size_t xn = 0; xn < 2; ++xn) {
        EXPECT_NEAR(p[xn], 0.5 * (K({x, a, 0, xn}) + K({x, a, 1, xn})), 1e-15);
      }
      EXPECT_NEAR(model->cost(x, a, half), 0.5 * (d({x, a, 0}) + d({x, a, 1})), 1e-15);
    }
  }
}

TEST(Model, ZeroDriftUnitNoiseIsDiscretizedStandardNormal) {
  const auto model = linear_gaussian(9, -2.0, 2.0, 0.0, 0.0, 1.0);
  std::vector<double> expect(9);
  for (std::size_t i = 0; i < 9; ++i) {
    const double xi = -2.0 + 0.5 * static_cast<double>(i);
    expect[i] = std::exp(-0.5 * xi * xi);
  }
  const double s = std::accumulate(expect.begin(), expect.end(), 0.0);
  for (double& v : expect) v /= s;
  for (const auto& mu : simplex_mesh(9, 2)) {
    for (std::size_t x = 0; x < 9; ++x) {
      EXPECT_LT(max_abs_diff(model->transition(x, 0, mu), expect), 1e-15);
    }
  }
}

TEST(Model, IdentitySensorConcentratesOnOwnCell) {
  // Observation cells three noise standard deviations apart.
  GaussianTables t;
  t.states = uniform_grid(-6.0, 6.0, 5);
  t.observations = uniform_grid(-6.0, 6.0, 5);
  t.actions = Grid::with_coords({0.0}, 1.0);
  t.f = Tensor({5, 1, 5});
  t.g = Tensor({5, 1}, 1.0);
  t.h = Tensor({5, 5});
  t.d = Tensor({5, 1, 5});
  for (std::size_t x = 0; x < 5; ++x) {
    for (std::size_t xb = 0; xb < 5; ++xb) t.h({x, xb}) = t.states.coords[x];
  }
  const auto model = build_gaussian(std::move(t), 0.9, Measure::uniform(5));
  for (std::size_t x = 0; x < 5; ++x) {
    const auto r = model->observation(x, Measure::uniform(5));
    // exp(-4.5) / (1 + 2 exp(-4.5)) is the largest leak to a neighbour.
    EXPECT_GT(r[x], 1.0 - 2.0 * std::exp(-4.5));
  }
}

TEST(Model, TransitionMeanMatchesHighResolutionIntegral) {
  // f = 0.5 xbar, unit noise, 5-point grid on [-2, 2].
  const auto coarse = linear_gaussian(5, -2.0, 2.0, 0.5, 0.0, 1.0);
  const Measure mu({0.1, 0.1, 0.2, 0.3, 0.3});
  double F = 0.0;
  for (std::size_t i = 0; i < 5; ++i) F += mu[i] * (-2.0 + i);
  F *= 0.5;
  // Truncated normal mean over the grid's extent [-2.5, 2.5] by fine midpoint integration.
  const int n = 200000;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = -2.5 + 5.0 * (k + 0.5) / n;
    const double phi = std::exp(-0.5 * (x - F) * (x - F));
    num += x * phi;
    den += phi;
  }
  const double coarse_mean = mean_of(coarse->states(), coarse->transition(2, 0, mu));
  EXPECT_NEAR(coarse_mean, num / den, 0.02);

  // On a wide fine grid truncation vanishes and the mean is F itself.
  const auto fine = linear_gaussian(801, -10.0, 10.0, 0.5, 0.0, 1.0);
  std::vector<double> wide(801, 0.0);
  for (std::size_t i = 0; i < 5; ++i) wide[320 + 40 * i] = mu[i];  // coords -2..2 step 1
  EXPECT_NEAR(mean_of(fine->states(), fine->transition(0, 0, Measure(wide))), F, 1e-9);
}

TEST(Model, ValidateAcceptsBundledModels) {
  for (const char* name : {"decoupled", "coupled_toy", "gaussian", "unit_cost"}) {
    EXPECT_TRUE(validate(*bundled(name)).empty()) << name;
  }
}

TEST(Model, ValidateNamesDefectiveTransitionRow) {
  Tensor K({2, 1, 2, 2}), d({2, 1, 2}, 1.0), r({2, 1}, 1.0);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t xb = 0; xb < 2; ++xb) {
      K({x, 0, xb, 0}) = 0.5;
      K({x, 0, xb, 1}) = 0.5;
    }
  }
  K({1, 0, 0, 1}) = 0.4;  // row sums to 0.9
  const TabularAffineModel model(K, d, r, 0.9, Measure::uniform(2));
  const auto v = validate(model);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("(x,a,xbar)=(1,0,0)"), std::string::npos) << v[0];
}

TEST(Model, ValidateReportsNegativeCost) {
  Tensor K({2, 1, 2, 2}, 0.5), d({2, 1, 2}, 1.0), r({2, 1}, 1.0);
  d({0, 0, 1}) = -0.5;
  const TabularAffineModel model(K, d, r, 0.9, Measure::uniform(2));
  const auto v = validate(model);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("negative"), std::string::npos);
}

TEST(Model, BuildersRejectDegenerateInput) {
  Tensor K({2, 1, 2, 2}, 0.5), d({2, 1, 2}, 1.0), r({2, 1}, 1.0);
  K({0, 0, 0, 0}) = 0.7;
  EXPECT_THROW(build_tabular(K, d, r, 0.9, Measure::uniform(2)), ValidationError);
  EXPECT_THROW(Measure({0.5, 0.4}), ValidationError);
  EXPECT_THROW(linear_gaussian(5, -2.0, 2.0, 0.0, 0.0, 0.0), ValidationError);
  GaussianTables t;
  t.states = Grid::indexed(3);
  t.observations = Grid::indexed(3);
  t.actions = Grid::indexed(1);
  EXPECT_THROW(build_gaussian(t, 0.9, Measure::uniform(3)), ValidationError);
}

TEST(ModelProperty, KernelsAreStochasticOnSimplexMesh) {
  acceptance::Uniform u(101);
  std::vector<std::shared_ptr<const GameModel>> models{bundled("gaussian"), bundled("coupled_toy")};
  for (int i = 0; i < 20; ++i) {
    models.push_back(acceptance::random_tabular(u, 2 + u.index(3), 1 + u.index(3), 1 + u.index(3),
                                                true));
  }
  for (const auto& m : models) {
    for (const auto& mu : simplex_mesh(m->num_states(), m->num_states() > 4 ? 1 : 4)) {
      for (std::size_t x = 0; x < m->num_states(); ++x) {
        const auto r = m->observation(x, mu);
        EXPECT_NEAR(std::accumulate(r.begin(), r.end(), 0.0), 1.0, 1e-12);
        for (std::size_t a = 0; a < m->num_actions(); ++a) {
          const auto p = m->transition(x, a, mu);
          EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
          for (double v : p) EXPECT_GE(v, 0.0);
          const double c = m->cost(x, a, mu);
          EXPECT_GE(c, 0.0);
          EXPECT_LE(c, m->cost_bound() + 1e-12);
        }
      }
    }
  }
}

TEST(ModelProperty, TabularCouplingIsAffine) {
  acceptance::Uniform u(202);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nx = 2 + u.index(3);
    const auto m = acceptance::random_tabular(u, nx, 2, 2, true);
    const Measure m1(acceptance::random_distribution(u, nx, 0.0), 1e-9);
    const Measure m2(acceptance::random_distribution(u, nx, 0.0), 1e-9);
    for (double lam : {0.0, 0.25, 0.5, 1.0}) {
      std::vector<double> mix(nx);
      for (std::size_t i = 0; i < nx; ++i) mix[i] = lam * m1[i] + (1.0 - lam) * m2[i];
      const Measure mu = Measure::unchecked(mix);
      for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t a = 0; a < 2; ++a) {
          const auto p = m->transition(x, a, mu);
          const auto p1 = m->transition(x, a, m1), p2 = m->transition(x, a, m2);
          for (std::size_t xn = 0; xn < nx; ++xn) {
            EXPECT_NEAR(p[xn], lam * p1[xn] + (1.0 - lam) * p2[xn], 1e-12);
          }
          EXPECT_NEAR(m->cost(x, a, mu), lam * m->cost(x, a, m1) + (1.0 - lam) * m->cost(x, a, m2),
                      1e-12);
        }
      }
    }
  }
}

TEST(ModelProperty, GaussianMomentBoundHolds) {
  const auto m = bundled("gaussian");
  const auto& w = m->moment_weights();
  acceptance::Uniform u(303);
  std::vector<Measure> mus = simplex_mesh(m->num_states(), 1);
  for (int i = 0; i < 20; ++i) {
    mus.emplace_back(acceptance::random_distribution(u, m->num_states(), 0.0), 1e-9);
  }
  for (const auto& mu : mus) {
    for (std::size_t x = 0; x < m->num_states(); ++x) {
      for (std::size_t a = 0; a < m->num_actions(); ++a) {
        const auto p = m->transition(x, a, mu);
        double Ew = 0.0;
        for (std::size_t xn = 0; xn < p.size(); ++xn) Ew += w[xn] * p[xn];
        EXPECT_LE(Ew, 1.05 * m->moment_alpha() * w[x]);
      }
    }
  }
  double M = 0.0;
  for (std::size_t x = 0; x < w.size(); ++x) M += w[x] * m->initial()[x];
  EXPECT_NEAR(m->moment_mass(), M, 1e-12);
}
