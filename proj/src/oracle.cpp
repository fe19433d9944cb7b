#include "mfg/oracle.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfg::oracle {

Conditional exact_conditional(const GameModel& model, const MeasureFlow& flow,
                              const std::vector<std::size_t>& actions,
                              const std::vector<std::size_t>& observations) {
  if (actions.size() != observations.size()) {
    throw std::invalid_argument("exact_conditional: one action per observation");
  }
  const std::size_t nx = model.num_states();
  const std::size_t t = actions.size();
  Conditional out;
  out.posterior.assign(nx, 0.0);

  // Odometer over x_0..x_t.
  std::vector<std::size_t> path(t + 1, 0);
  while (true) {
    double p = model.initial()[path[0]];
    for (std::size_t k = 0; k < t && p > 0.0; ++k) {
      p *= model.transition(path[k], actions[k], flow[k])[path[k + 1]];
      p *= model.observation(path[k + 1], flow[k + 1])[observations[k]];
    }
    out.posterior[path[t]] += p;
    out.evidence += p;
    std::size_t k = 0;
    while (k <= t && ++path[k] == nx) path[k++] = 0;
    if (k > t) break;
  }
  if (out.evidence > 0.0) {
    for (double& v : out.posterior) v /= out.evidence;
  }
  return out;
}

namespace {

// Unnormalized joint alpha(x, h) at every history of length t = 0..T+1.
struct JointNode {
  std::vector<double> alpha;
};

void children_of(const GameModel& model, const MeasureFlow& flow, int t,
                 const std::vector<double>& alpha, std::size_t a,
                 std::vector<std::vector<double>>& out) {
  const std::size_t nx = model.num_states(), ny = model.num_obs();
  out.assign(ny, std::vector<double>(nx, 0.0));
  for (std::size_t x = 0; x < nx; ++x) {
    if (alpha[x] == 0.0) continue;
    const auto p = model.transition(x, a, flow[static_cast<std::size_t>(t)]);
    for (std::size_t xn = 0; xn < nx; ++xn) {
      const auto r = model.observation(xn, flow[static_cast<std::size_t>(t) + 1]);
      for (std::size_t y = 0; y < ny; ++y) out[y][xn] += alpha[x] * p[xn] * r[y];
    }
  }
}

double stage_cost(const GameModel& model, const MeasureFlow& flow, int t,
                  const std::vector<double>& alpha, std::size_t a) {
  double c = 0.0;
  for (std::size_t x = 0; x < alpha.size(); ++x) {
    c += alpha[x] * model.cost(x, a, flow[static_cast<std::size_t>(t)]);
  }
  return c;
}

double evaluate_rec(const GameModel& model, const MeasureFlow& flow, int horizon,
                    const HistoryPolicy& policy, int t, History& h,
                    const std::vector<double>& alpha) {
  const std::size_t a = policy(t, h);
  double total = std::pow(model.discount(), t) * stage_cost(model, flow, t, alpha, a);
  if (t == horizon) return total;
  std::vector<std::vector<double>> kids;
  children_of(model, flow, t, alpha, a, kids);
  for (std::size_t y = 0; y < kids.size(); ++y) {
    h.push_back(y);
    total += evaluate_rec(model, flow, horizon, policy, t + 1, h, kids[y]);
    h.pop_back();
  }
  return total;
}

}  // namespace

double evaluate_history_policy(const GameModel& model, const MeasureFlow& flow, int horizon,
                               const HistoryPolicy& policy) {
  History h;
  return evaluate_rec(model, flow, horizon, policy, 0, h, model.initial().vec());
}

ExhaustiveResult exhaustive_policy_minimum(const GameModel& model, const MeasureFlow& flow,
                                           int horizon) {
  const std::size_t na = model.num_actions(), ny = model.num_obs();
  // Decision points: every history of length 0..T, numbered breadth first.
  std::size_t points = 0;
  std::vector<std::size_t> level_start;
  std::size_t width = 1;
  for (int t = 0; t <= horizon; ++t) {
    level_start.push_back(points);
    points += width;
    width *= ny;
  }
  const double log_count = static_cast<double>(points) * std::log2(static_cast<double>(na));
  if (log_count > 22.0) throw std::invalid_argument("exhaustive_policy_minimum: too many policies");

  std::size_t total = 1;
  for (std::size_t i = 0; i < points; ++i) total *= na;

  std::vector<std::size_t> assignment(points, 0);
  auto index_of = [&](int t, const History& h) {
    std::size_t idx = 0;
    for (auto y : h) idx = idx * ny + y;
    return level_start[static_cast<std::size_t>(t)] + idx;
  };
  const HistoryPolicy policy = [&](int t, const History& h) { return assignment[index_of(t, h)]; };

  ExhaustiveResult res;
  res.policies = total;
  res.minimum = INFINITY;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < points; ++i) {
      assignment[i] = c % na;
      c /= na;
    }
    res.minimum = std::min(res.minimum, evaluate_history_policy(model, flow, horizon, policy));
  }
  return res;
}

namespace {

// Returns the unnormalized optimal cost-to-go from history h at time t.
double q_rec(const GameModel& model, const MeasureFlow& flow, int horizon, int t, History& h,
             const std::vector<double>& alpha, HistoryQ& out) {
  const std::size_t na = model.num_actions();
  double mass = 0.0;
  for (double v : alpha) mass += v;
  std::vector<double> Q(na, 0.0);
  for (std::size_t a = 0; a < na; ++a) {
    Q[a] = stage_cost(model, flow, t, alpha, a);
    if (t == horizon) continue;
    std::vector<std::vector<double>> kids;
    children_of(model, flow, t, alpha, a, kids);
    double cont = 0.0;
    for (std::size_t y = 0; y < kids.size(); ++y) {
      h.push_back(y);
      // Histories branch on actions too; key the child by (action, y) pairs
      // flattened as a * |Y| + y so different actions do not collide.
      h.back() = a * model.num_obs() + y;
      cont += q_rec(model, flow, horizon, t + 1, h, kids[y], out);
      h.pop_back();
    }
    Q[a] += model.discount() * cont;
  }
  std::vector<double> q(na);
  for (std::size_t a = 0; a < na; ++a) q[a] = mass > 0.0 ? Q[a] / mass : 0.0;
  out.q[h] = q;
  out.probability[h] = mass;
  return *std::min_element(Q.begin(), Q.end());
}

}  // namespace

HistoryQ history_q_values(const GameModel& model, const MeasureFlow& flow, int horizon) {
  HistoryQ out;
  History h;
  q_rec(model, flow, horizon, 0, h, model.initial().vec(), out);
  return out;
}

double max_q_gap(const GameModel& model, const MeasureFlow& flow, int horizon,
                 const HistoryPolicy& policy) {
  const HistoryQ hq = history_q_values(model, flow, horizon);
  const std::size_t ny = model.num_obs();
  double gap = 0.0;
  // Walk the histories the policy reaches; hq keys interleave actions.
  std::vector<std::pair<History, History>> frontier{{{}, {}}};  // (q key, observation history)
  for (int t = 0; t <= horizon; ++t) {
    std::vector<std::pair<History, History>> next;
    for (const auto& [key, obs] : frontier) {
      if (hq.probability.at(key) <= 1e-12) continue;
      const auto& q = hq.q.at(key);
      const std::size_t a = policy(t, obs);
      gap = std::max(gap, q[a] - *std::min_element(q.begin(), q.end()));
      for (std::size_t y = 0; y < ny; ++y) {
        History k2 = key, o2 = obs;
        k2.push_back(a * ny + y);
        o2.push_back(y);
        next.emplace_back(std::move(k2), std::move(o2));
      }
    }
    frontier = std::move(next);
  }
  return gap;
}

MeasureFlow induced_flow_exact(const GameModel& model, int horizon, const HistoryPolicy& policy) {
  const std::size_t nx = model.num_states(), ny = model.num_obs();
  std::vector<Measure> out{model.initial()};
  std::vector<std::pair<History, std::vector<double>>> layer{{{}, model.initial().vec()}};
  for (int t = 0; t <= horizon; ++t) {
    const Measure mu_t = out.back();
    std::vector<double> next_mu(nx, 0.0);
    std::vector<std::pair<History, std::vector<double>>> next;
    for (const auto& [h, alpha] : layer) {
      const std::size_t a = policy(t, h);
      std::vector<double> moved(nx, 0.0);
      for (std::size_t x = 0; x < nx; ++x) {
        if (alpha[x] == 0.0) continue;
        const auto p = model.transition(x, a, mu_t);
        for (std::size_t xn = 0; xn < nx; ++xn) moved[xn] += alpha[x] * p[xn];
      }
      for (std::size_t xn = 0; xn < nx; ++xn) next_mu[xn] += moved[xn];
      if (t == horizon) continue;
      for (std::size_t y = 0; y < ny; ++y) {
        std::vector<double> child(nx);
        // Observation kernels of the models handled here are mu-free.
        for (std::size_t xn = 0; xn < nx; ++xn) {
          child[xn] = moved[xn] * model.observation(xn, mu_t)[y];
        }
        History h2 = h;
        h2.push_back(y);
        next.emplace_back(std::move(h2), std::move(child));
      }
    }
    double s = 0.0;
    for (double v : next_mu) s += v;
    for (double& v : next_mu) v /= s;
    out.push_back(Measure(std::move(next_mu), 1e-9));
    layer = std::move(next);
  }
  return MeasureFlow(std::move(out));
}

double binomial_mean_abs_deviation(int N, double p) {
  double total = 0.0;
  for (int k = 0; k <= N; ++k) {
    const double logc = std::lgamma(N + 1.0) - std::lgamma(k + 1.0) - std::lgamma(N - k + 1.0);
    const double logp = (k > 0 ? k * std::log(p) : 0.0) + (N - k > 0 ? (N - k) * std::log1p(-p) : 0.0);
    total += std::exp(logc + logp) * std::abs(static_cast<double>(k) / N - p);
  }
  return total;
}

}  // namespace mfg::oracle
