#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfg {

/// Thrown when a model, measure or tensor fails its structural invariants.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A finite grid of states, observations or actions. Coordinates are only
/// present for grids that discretize a continuous space.
struct Grid {
  std::size_t size = 0;
  std::vector<double> coords;
  std::optional<double> cell_width;

  static Grid indexed(std::size_t n);
  static Grid with_coords(std::vector<double> coords, double cell_width);

  bool has_coords() const { return !coords.empty(); }
  // Throws ValidationError if size is zero or coords are not strictly increasing.
  void check(const std::string& what) const;
};

/// Probability weights over a state grid (a mean-field term).
class Measure {
 public:
  Measure() = default;
  // Validates: nonnegative, sums to 1 within `tol`.
  explicit Measure(std::vector<double> weights, double tol = 1e-12);

  static Measure point_mass(std::size_t n, std::size_t at);
  static Measure uniform(std::size_t n);
  // Skips validation; used for intermediate sums that are checked later.
  static Measure unchecked(std::vector<double> weights);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  const std::vector<double>& vec() const { return weights_; }

  bool operator==(const Measure&) const = default;

 private:
  std::vector<double> weights_;
};

// L1 distance between two weight vectors of equal length.
double l1_distance(std::span<const double> a, std::span<const double> b);

/// All kernels of a model evaluated at one fixed mean-field measure. Rows are
/// laid out so that the filter and the simulator can index them directly.
struct StageKernels {
  std::size_t num_states = 0;
  std::size_t num_obs = 0;
  std::size_t num_actions = 0;
  std::vector<double> transition;   // [a][x][x']
  std::vector<double> observation;  // [x][y]
  std::vector<double> cost;         // [x][a]

  std::span<const double> transition_row(std::size_t x, std::size_t a) const {
    return {transition.data() + (a * num_states + x) * num_states, num_states};
  }
  std::span<const double> observation_row(std::size_t x) const {
    return {observation.data() + x * num_obs, num_obs};
  }
  double cost_at(std::size_t x, std::size_t a) const { return cost[x * num_actions + a]; }
};

/// Capability record of a partially observed mean-field game on finite grids:
/// transition p(.|x,a,mu), observation r(.|x,mu), cost c(x,a,mu), discount,
/// initial measure and the moment data (w, alpha, M) used by the tightness checks.
class GameModel {
 public:
  virtual ~GameModel() = default;

  const Grid& states() const { return states_; }
  const Grid& observations() const { return observations_; }
  const Grid& actions() const { return actions_; }
  std::size_t num_states() const { return states_.size; }
  std::size_t num_obs() const { return observations_.size; }
  std::size_t num_actions() const { return actions_.size; }

  virtual void transition(std::size_t x, std::size_t a, const Measure& mu,
                          std::span<double> out) const = 0;
  virtual void observation(std::size_t x, const Measure& mu, std::span<double> out) const = 0;
  virtual double cost(std::size_t x, std::size_t a, const Measure& mu) const = 0;
  // True when r depends on the mean-field term; the simulator refuses such models.
  virtual bool observation_depends_on_measure() const = 0;
  virtual std::string family() const = 0;
  // Family-specific checks on the raw tabulated data, one entry per defect.
  virtual std::vector<std::string> structural_violations() const = 0;

  std::vector<double> transition(std::size_t x, std::size_t a, const Measure& mu) const;
  std::vector<double> observation(std::size_t x, const Measure& mu) const;
  StageKernels stage(const Measure& mu) const;

  double discount() const { return discount_; }
  const Measure& initial() const { return initial_; }
  double cost_bound() const { return cost_bound_; }
  const std::vector<double>& moment_weights() const { return moment_weights_; }
  double moment_alpha() const { return moment_alpha_; }
  double moment_mass() const { return moment_mass_; }

 protected:
  GameModel(Grid states, Grid observations, Grid actions, double discount, Measure initial);
  void set_cost_bound(double bound) { cost_bound_ = bound; }
  void set_moment(std::vector<double> weights, double alpha);

 private:
  Grid states_;
  Grid observations_;
  Grid actions_;
  double discount_;
  Measure initial_;
  double cost_bound_ = 0.0;
  std::vector<double> moment_weights_;
  double moment_alpha_ = 1.0;
  double moment_mass_ = 1.0;
};

/// Dense row-major tensor with a fixed shape.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  std::size_t offset(std::initializer_list<std::size_t> idx) const;
  double operator()(std::initializer_list<std::size_t> idx) const { return data[offset(idx)]; }
  double& operator()(std::initializer_list<std::size_t> idx) { return data[offset(idx)]; }
};

/// Affine coupling: p(.|x,a,mu) = sum_xbar mu(xbar) K(.|x,a,xbar),
/// c(x,a,mu) = sum_xbar mu(xbar) d(x,a,xbar), r(y|x) free of mu.
class TabularAffineModel final : public GameModel {
 public:
  using GameModel::observation;
  using GameModel::transition;

  // K has shape [X][A][X][X'] (last axis the next state), d has shape
  // [X][A][X], r has shape [X][Y]. No validation beyond shapes; see build_tabular.
  TabularAffineModel(Tensor coupling_transition, Tensor coupling_cost, Tensor observation_table,
                     double discount, Measure initial,
                     std::optional<std::vector<double>> moment_weights = std::nullopt,
                     double moment_alpha = 1.0);

  void transition(std::size_t x, std::size_t a, const Measure& mu,
                  std::span<double> out) const override;
  void observation(std::size_t x, const Measure& mu, std::span<double> out) const override;
  double cost(std::size_t x, std::size_t a, const Measure& mu) const override;
  bool observation_depends_on_measure() const override { return false; }
  std::string family() const override { return "tabular"; }
  std::vector<std::string> structural_violations() const override;

  const Tensor& coupling_transition() const { return K_; }
  const Tensor& coupling_cost() const { return d_; }
  const Tensor& observation_table() const { return r_; }

 private:
  Tensor K_;
  Tensor d_;
  Tensor r_;
};

/// Raw tabulations of the additive Gaussian-noise game
///   x' = F(x,a,mu) + g(x,a) w,  y = H(x,mu) + v,  w, v ~ N(0,1),
/// with F = sum mu(xbar) f(x,a,xbar), H = sum mu(xbar) h(x,xbar).
struct GaussianTables {
  Grid states;
  Grid observations;
  Grid actions;
  Tensor f;  // [X][A][X]
  Tensor g;  // [X][A]
  Tensor h;  // [X][X]
  Tensor d;  // [X][A][X]
  // When set, h must not depend on its second argument and r is mu-free.
  bool observation_measure_free = true;
  std::optional<double> growth_L;
};

/// Grid discretization of the Gaussian additive-noise model: densities are
/// evaluated at cell midpoints, multiplied by the cell width and renormalized.
class GaussianAdditiveModel final : public GameModel {
 public:
  using GameModel::observation;
  using GameModel::transition;

  GaussianAdditiveModel(GaussianTables tables, double discount, Measure initial);

  void transition(std::size_t x, std::size_t a, const Measure& mu,
                  std::span<double> out) const override;
  void observation(std::size_t x, const Measure& mu, std::span<double> out) const override;
  double cost(std::size_t x, std::size_t a, const Measure& mu) const override;
  bool observation_depends_on_measure() const override { return !tables_.observation_measure_free; }
  std::string family() const override { return "gaussian"; }
  std::vector<std::string> structural_violations() const override;

  double drift(std::size_t x, std::size_t a, const Measure& mu) const;
  double sensor_mean(std::size_t x, const Measure& mu) const;
  double noise_floor() const { return theta_; }
  double growth_L() const { return growth_L_; }
  const GaussianTables& tables() const { return tables_; }

 private:
  GaussianTables tables_;
  double theta_ = 0.0;
  double growth_L_ = 0.0;
};

std::shared_ptr<const TabularAffineModel> build_tabular(Tensor K, Tensor d, Tensor r,
                                                        double discount, Measure initial);
std::shared_ptr<const GaussianAdditiveModel> build_gaussian(GaussianTables tables,
                                                            double discount, Measure initial);

// Report-only check of all stochasticity, nonnegativity and bound invariants.
// Structural defects are reported first; sampled-kernel checks at the simplex
// vertices and centroid run only when the raw data is clean.
std::vector<std::string> validate(const GameModel& model);

}  // namespace mfg
