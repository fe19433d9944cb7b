#include "mfg/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mfg {

namespace {

constexpr double kStochasticTol = 1e-12;

std::string describe_index(std::initializer_list<std::size_t> idx) {
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (auto i : idx) {
    if (!first) os << ",";
    os << i;
    first = false;
  }
  os << ")";
  return os.str();
}

void check_shape(const Tensor& t, const std::vector<std::size_t>& shape, const char* name) {
  if (t.shape != shape) {
    std::ostringstream os;
    os << name << ": shape mismatch (expected rank " << shape.size() << " [";
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << "])";
    throw ValidationError(os.str());
  }
}

// Flags a row that is not a probability vector.
std::optional<std::string> row_defect(std::span<const double> row) {
  double sum = 0.0;
  for (double v : row) {
    if (!(v >= 0.0)) return "negative or NaN entry";
    sum += v;
  }
  if (std::abs(sum - 1.0) > kStochasticTol) {
    std::ostringstream os;
    os.precision(12);
    os << "sums to " << sum;
    return os.str();
  }
  return std::nullopt;
}

}  // namespace

Grid Grid::indexed(std::size_t n) { return Grid{n, {}, std::nullopt}; }

Grid Grid::with_coords(std::vector<double> coords, double cell_width) {
  Grid g;
  g.size = coords.size();
  g.coords = std::move(coords);
  g.cell_width = cell_width;
  return g;
}

void Grid::check(const std::string& what) const {
  if (size == 0) throw ValidationError(what + ": grid must have at least one point");
  if (!coords.empty()) {
    if (coords.size() != size) throw ValidationError(what + ": coords length differs from size");
    for (std::size_t i = 1; i < coords.size(); ++i) {
      if (!(coords[i] > coords[i - 1])) {
        throw ValidationError(what + ": coords must be strictly increasing");
      }
    }
  }
  if (cell_width && !(*cell_width > 0.0)) {
    throw ValidationError(what + ": cell_width must be positive");
  }
}

Measure::Measure(std::vector<double> weights, double tol) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ValidationError("measure: empty weight vector");
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0)) {
      throw ValidationError("measure: negative weight at index " + std::to_string(i));
    }
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os.precision(15);
    os << "measure: weights sum to " << sum;
    throw ValidationError(os.str());
  }
}

Measure Measure::point_mass(std::size_t n, std::size_t at) {
  std::vector<double> w(n, 0.0);
  w.at(at) = 1.0;
  return Measure(std::move(w));
}

Measure Measure::uniform(std::size_t n) {
  return Measure(std::vector<double>(n, 1.0 / static_cast<double>(n)), 1e-12);
}

Measure Measure::unchecked(std::vector<double> weights) {
  Measure m;
  m.weights_ = std::move(weights);
  return m;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("l1_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

Tensor::Tensor(std::vector<std::size_t> s, double fill) : shape(std::move(s)) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  data.assign(n, fill);
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> idx) const {
  std::size_t off = 0;
  std::size_t k = 0;
  for (auto i : idx) {
    off = off * shape[k] + i;
    ++k;
  }
  return off;
}

GameModel::GameModel(Grid states, Grid observations, Grid actions, double discount,
                     Measure initial)
    : states_(std::move(states)),
      observations_(std::move(observations)),
      actions_(std::move(actions)),
      discount_(discount),
      initial_(std::move(initial)) {
  states_.check("states");
  observations_.check("observations");
  actions_.check("actions");
  if (!(discount_ > 0.0 && discount_ < 1.0) && discount_ != 0.0) {
    throw ValidationError("discount must lie in [0,1)");
  }
  if (initial_.size() != states_.size) {
    throw ValidationError("initial measure length differs from the state grid");
  }
  moment_weights_.assign(states_.size, 1.0);
}

void GameModel::set_moment(std::vector<double> weights, double alpha) {
  if (weights.size() != states_.size) throw ValidationError("moment weights: wrong length");
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("moment weights must be nonnegative");
  }
  if (!(alpha >= 0.0)) throw ValidationError("moment alpha must be nonnegative");
  moment_weights_ = std::move(weights);
  moment_alpha_ = alpha;
  moment_mass_ = 0.0;
  for (std::size_t x = 0; x < states_.size; ++x) moment_mass_ += moment_weights_[x] * initial_[x];
}

std::vector<double> GameModel::transition(std::size_t x, std::size_t a, const Measure& mu) const {
  std::vector<double> out(num_states());
  transition(x, a, mu, out);
  return out;
}

std::vector<double> GameModel::observation(std::size_t x, const Measure& mu) const {
  std::vector<double> out(num_obs());
  observation(x, mu, out);
  return out;
}

StageKernels GameModel::stage(const Measure& mu) const {
  StageKernels k;
  k.num_states = num_states();
  k.num_obs = num_obs();
  k.num_actions = num_actions();
  k.transition.resize(k.num_actions * k.num_states * k.num_states);
  k.observation.resize(k.num_states * k.num_obs);
  k.cost.resize(k.num_states * k.num_actions);
  for (std::size_t a = 0; a < k.num_actions; ++a) {
    for (std::size_t x = 0; x < k.num_states; ++x) {
      transition(x, a, mu,
                 std::span<double>(k.transition.data() + (a * k.num_states + x) * k.num_states,
                                   k.num_states));
    }
  }
  for (std::size_t x = 0; x < k.num_states; ++x) {
    observation(x, mu, std::span<double>(k.observation.data() + x * k.num_obs, k.num_obs));
    for (std::size_t a = 0; a < k.num_actions; ++a) k.cost[x * k.num_actions + a] = cost(x, a, mu);
  }
  return k;
}

// ---------------------------------------------------------------------------
// Tabular affine family

TabularAffineModel::TabularAffineModel(Tensor coupling_transition, Tensor coupling_cost,
                                       Tensor observation_table, double discount,
                                       Measure initial,
                                       std::optional<std::vector<double>> moment_weights,
                                       double moment_alpha)
    : GameModel(Grid::indexed(coupling_transition.shape.empty() ? 0 : coupling_transition.shape[0]),
                Grid::indexed(observation_table.shape.size() == 2 ? observation_table.shape[1] : 0),
                Grid::indexed(coupling_transition.shape.size() > 1 ? coupling_transition.shape[1] : 0),
                discount, std::move(initial)),
      K_(std::move(coupling_transition)),
      d_(std::move(coupling_cost)),
      r_(std::move(observation_table)) {
  const std::size_t nx = num_states(), na = num_actions(), ny = num_obs();
  check_shape(K_, {nx, na, nx, nx}, "transition tensor");
  check_shape(d_, {nx, na, nx}, "cost tensor");
  check_shape(r_, {nx, ny}, "observation table");
  set_cost_bound(d_.data.empty() ? 0.0 : *std::max_element(d_.data.begin(), d_.data.end()));
  set_moment(moment_weights.value_or(std::vector<double>(nx, 1.0)), moment_alpha);
}

void TabularAffineModel::transition(std::size_t x, std::size_t a, const Measure& mu,
                                    std::span<double> out) const {
  const std::size_t nx = num_states();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t xb = 0; xb < nx; ++xb) {
    const double m = mu[xb];
    if (m == 0.0) continue;
    const double* row = K_.data.data() + K_.offset({x, a, xb, 0});
    for (std::size_t xn = 0; xn < nx; ++xn) out[xn] += m * row[xn];
  }
}

void TabularAffineModel::observation(std::size_t x, const Measure&, std::span<double> out) const {
  const double* row = r_.data.data() + r_.offset({x, 0});
  std::copy(row, row + num_obs(), out.begin());
}

double TabularAffineModel::cost(std::size_t x, std::size_t a, const Measure& mu) const {
  double c = 0.0;
  for (std::size_t xb = 0; xb < num_states(); ++xb) c += mu[xb] * d_({x, a, xb});
  return c;
}

std::vector<std::string> TabularAffineModel::structural_violations() const {
  std::vector<std::string> out;
  const std::size_t nx = num_states(), na = num_actions(), ny = num_obs();
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t xb = 0; xb < nx; ++xb) {
        std::span<const double> row(K_.data.data() + K_.offset({x, a, xb, 0}), nx);
        if (auto defect = row_defect(row)) {
          out.push_back("transition row (x,a,xbar)=" + describe_index({x, a, xb}) + " " + *defect);
        }
        if (!(d_({x, a, xb}) >= 0.0)) {
          out.push_back("cost entry (x,a,xbar)=" + describe_index({x, a, xb}) + " is negative");
        }
      }
    }
    std::span<const double> orow(r_.data.data() + r_.offset({x, 0}), ny);
    if (auto defect = row_defect(orow)) {
      out.push_back("observation row x=" + std::to_string(x) + " " + *defect);
    }
  }
  return out;
}

std::shared_ptr<const TabularAffineModel> build_tabular(Tensor K, Tensor d, Tensor r,
                                                        double discount, Measure initial) {
  auto model = std::make_shared<const TabularAffineModel>(std::move(K), std::move(d), std::move(r),
                                                          discount, std::move(initial));
  auto bad = model->structural_violations();
  if (!bad.empty()) throw ValidationError(bad.front());
  return model;
}

// ---------------------------------------------------------------------------
// Gaussian additive-noise family

namespace {

void discretized_normal(const Grid& grid, double mean, double sd, std::span<double> out) {
  const double width = *grid.cell_width;
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size; ++i) {
    const double z = (grid.coords[i] - mean) / sd;
    out[i] = std::exp(-0.5 * z * z) * width;
    total += out[i];
  }
  if (total > 0.0) {
    for (auto& v : out) v /= total;
    return;
  }
  // All midpoints far in one tail: the nearest boundary cell takes the mass.
  std::fill(out.begin(), out.end(), 0.0);
  out[mean < grid.coords.front() ? 0 : grid.size - 1] = 1.0;
}

}  // namespace

GaussianAdditiveModel::GaussianAdditiveModel(GaussianTables tables, double discount,
                                             Measure initial)
    : GameModel(tables.states, tables.observations, tables.actions, discount, std::move(initial)),
      tables_(std::move(tables)) {
  if (!states().has_coords() || !states().cell_width || !observations().has_coords() ||
      !observations().cell_width || !actions().has_coords()) {
    throw ValidationError("gaussian model: state, observation and action grids need coordinates "
                          "(and cell widths for states and observations)");
  }
  const std::size_t nx = num_states(), na = num_actions();
  check_shape(tables_.f, {nx, na, nx}, "f");
  check_shape(tables_.g, {nx, na}, "g");
  check_shape(tables_.h, {nx, nx}, "h");
  check_shape(tables_.d, {nx, na, nx}, "d");

  theta_ = std::numeric_limits<double>::infinity();
  for (double v : tables_.g.data) theta_ = std::min(theta_, std::abs(v));
  if (!(theta_ > 0.0)) throw ValidationError("gaussian model: inf |g| must be positive");

  set_cost_bound(*std::max_element(tables_.d.data.begin(), tables_.d.data.end()));

  double f_sup = 0.0;
  for (double v : tables_.f.data) f_sup = std::max(f_sup, std::abs(v));

  const auto& xi = states().coords;
  if (tables_.growth_L) {
    growth_L_ = *tables_.growth_L;
  } else {
    growth_L_ = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      if (xi[x] == 0.0) continue;
      for (std::size_t a = 0; a < na; ++a) {
        growth_L_ = std::max(growth_L_, tables_.g({x, a}) * tables_.g({x, a}) / (xi[x] * xi[x]));
      }
    }
  }
  double alpha = std::max(1.0 + f_sup * f_sup, growth_L_);
  // A grid point at the origin cannot satisfy g^2 <= L x^2 with inf|g| > 0;
  // alpha is raised there so that 1 + |f|^2 + g^2 <= alpha w(x) holds on the grid.
  std::vector<double> w(nx);
  for (std::size_t x = 0; x < nx; ++x) {
    w[x] = 1.0 + xi[x] * xi[x];
    for (std::size_t a = 0; a < na; ++a) {
      const double need = (1.0 + f_sup * f_sup + tables_.g({x, a}) * tables_.g({x, a})) / w[x];
      alpha = std::max(alpha, need);
    }
  }
  set_moment(std::move(w), alpha);
}

double GaussianAdditiveModel::drift(std::size_t x, std::size_t a, const Measure& mu) const {
  double F = 0.0;
  for (std::size_t xb = 0; xb < num_states(); ++xb) F += mu[xb] * tables_.f({x, a, xb});
  return F;
}

double GaussianAdditiveModel::sensor_mean(std::size_t x, const Measure& mu) const {
  if (tables_.observation_measure_free) return tables_.h({x, 0});
  double H = 0.0;
  for (std::size_t xb = 0; xb < num_states(); ++xb) H += mu[xb] * tables_.h({x, xb});
  return H;
}

void GaussianAdditiveModel::transition(std::size_t x, std::size_t a, const Measure& mu,
                                       std::span<double> out) const {
  discretized_normal(states(), drift(x, a, mu), std::abs(tables_.g({x, a})), out);
}

void GaussianAdditiveModel::observation(std::size_t x, const Measure& mu,
                                        std::span<double> out) const {
  discretized_normal(observations(), sensor_mean(x, mu), 1.0, out);
}

double GaussianAdditiveModel::cost(std::size_t x, std::size_t a, const Measure& mu) const {
  double c = 0.0;
  for (std::size_t xb = 0; xb < num_states(); ++xb) c += mu[xb] * tables_.d({x, a, xb});
  return c;
}

std::vector<std::string> GaussianAdditiveModel::structural_violations() const {
  std::vector<std::string> out;
  const std::size_t nx = num_states(), na = num_actions();
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t xb = 0; xb < nx; ++xb) {
        const double v = tables_.d({x, a, xb});
        if (!(v >= 0.0)) {
          out.push_back("cost entry (x,a,xbar)=" + describe_index({x, a, xb}) + " is negative");
        }
        if (!std::isfinite(tables_.f({x, a, xb}))) {
          out.push_back("f entry (x,a,xbar)=" + describe_index({x, a, xb}) + " is not finite");
        }
      }
    }
    if (tables_.observation_measure_free) {
      for (std::size_t xb = 1; xb < nx; ++xb) {
        if (tables_.h({x, xb}) != tables_.h({x, 0})) {
          out.push_back("h row x=" + std::to_string(x) +
                        " depends on the mean-field argument in measure-free mode");
          break;
        }
      }
    }
  }
  return out;
}

std::shared_ptr<const GaussianAdditiveModel> build_gaussian(GaussianTables tables,
                                                            double discount, Measure initial) {
  auto model = std::make_shared<const GaussianAdditiveModel>(std::move(tables), discount,
                                                             std::move(initial));
  auto bad = model->structural_violations();
  if (!bad.empty()) throw ValidationError(bad.front());
  return model;
}

// ---------------------------------------------------------------------------

std::vector<std::string> validate(const GameModel& model) {
  std::vector<std::string> out = model.structural_violations();
  if (!out.empty()) return out;

  const std::size_t nx = model.num_states(), na = model.num_actions();
  std::vector<Measure> samples;
  for (std::size_t i = 0; i < nx; ++i) samples.push_back(Measure::point_mass(nx, i));
  samples.push_back(Measure::uniform(nx));

  if (std::abs(std::accumulate(model.initial().vec().begin(), model.initial().vec().end(), 0.0) -
               1.0) > kStochasticTol) {
    out.push_back("initial measure does not sum to 1");
  }

  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& mu = samples[s];
    const std::string where = s < nx ? "at vertex " + std::to_string(s) : "at centroid";
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t a = 0; a < na; ++a) {
        if (auto defect = row_defect(model.transition(x, a, mu))) {
          out.push_back("transition (x,a)=" + describe_index({x, a}) + " " + where + " " + *defect);
        }
        const double c = model.cost(x, a, mu);
        if (!(c >= 0.0) || c > model.cost_bound() + 1e-12) {
          out.push_back("cost (x,a)=" + describe_index({x, a}) + " " + where +
                        " outside [0, cost_bound]");
        }
      }
      if (auto defect = row_defect(model.observation(x, mu))) {
        out.push_back("observation x=" + std::to_string(x) + " " + where + " " + *defect);
      }
    }
  }
  return out;
}

}  // namespace mfg
