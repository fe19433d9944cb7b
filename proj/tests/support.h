#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mfg/config.h"
#include "mfg/model.h"
#include "mfg/oracle.h"
#include "mfg/solver.h"

namespace mfg::testing {

using Matrix = std::vector<std::vector<double>>;

inline std::string model_path(const std::string& name) {
  return std::string(MFG_MODELS_DIR) + "/" + name + ".json";
}

inline std::shared_ptr<const GameModel> bundled(const std::string& name) {
  return load_model(model_path(name)).model;
}

// Measure-free tabular model: p[a][x][x'], c[x][a], r[x][y].
inline std::shared_ptr<const TabularAffineModel> decoupled_model(
    const std::vector<Matrix>& p, const Matrix& c, const Matrix& r, double beta,
    std::vector<double> mu0,
    std::optional<std::vector<double>> moment_weights = std::nullopt, double alpha = 1.0) {
  const std::size_t na = p.size(), nx = p[0].size(), ny = r[0].size();
  Tensor K({nx, na, nx, nx}), d({nx, na, nx}), R({nx, ny});
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t xb = 0; xb < nx; ++xb) {
        for (std::size_t xn = 0; xn < nx; ++xn) K({x, a, xb, xn}) = p[a][x][xn];
        d({x, a, xb}) = c[x][a];
      }
    }
    for (std::size_t y = 0; y < ny; ++y) R({x, y}) = r[x][y];
  }
  return std::make_shared<const TabularAffineModel>(std::move(K), std::move(d), std::move(R), beta,
                                                    Measure(std::move(mu0), 1e-9),
                                                    std::move(moment_weights), alpha);
}

inline Matrix identity(std::size_t n) {
  Matrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

// Points of the simplex over n states: vertices, centroid and a coarse mesh.
inline std::vector<Measure> simplex_mesh(std::size_t n, int steps = 4) {
  std::vector<Measure> out;
  std::vector<int> k(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == n) {
      k[i] = left;
      std::vector<double> w(n);
      for (std::size_t j = 0; j < n; ++j) w[j] = static_cast<double>(k[j]) / steps;
      out.emplace_back(std::move(w), 1e-12);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      k[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, steps);
  out.push_back(Measure::uniform(n));
  return out;
}

// Replays a tree policy on observation histories; off-tree it keeps the last action.
inline oracle::HistoryPolicy history_policy(const Policy& policy) {
  return [&policy](int, const oracle::History& h) -> std::size_t {
    const BeliefTree& tree = *policy.tree;
    NodeId id = tree.root();
    std::size_t a = static_cast<std::size_t>(policy.at(id));
    for (std::size_t y : h) {
      const NodeId next = tree.child(id, a, y);
      if (next == kNoNode) return a;
      id = next;
      a = static_cast<std::size_t>(policy.at(id));
    }
    return a;
  };
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace mfg::testing
