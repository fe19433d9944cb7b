#include "mfg/measure_flow.h"

#include <cstring>

namespace mfg {

MeasureFlow::MeasureFlow(std::vector<Measure> measures) : measures_(std::move(measures)) {
  if (measures_.size() < 2) throw ValidationError("measure flow needs at least mu_0 and mu_1");
  for (const auto& m : measures_) {
    if (m.size() != measures_.front().size()) {
      throw ValidationError("measure flow entries have different lengths");
    }
  }
}

MeasureFlow MeasureFlow::constant(const Measure& initial, int horizon) {
  return MeasureFlow(std::vector<Measure>(static_cast<std::size_t>(horizon) + 2, initial));
}

MeasureFlow MeasureFlow::recursive_from_initial(const GameModel& model, int horizon,
                                                std::size_t action) {
  std::vector<Measure> out{model.initial()};
  const std::size_t nx = model.num_states();
  std::vector<double> row(nx);
  for (int t = 0; t <= horizon; ++t) {
    std::vector<double> next(nx, 0.0);
    const Measure& mu = out.back();
    for (std::size_t x = 0; x < nx; ++x) {
      if (mu[x] == 0.0) continue;
      model.transition(x, action, mu, row);
      for (std::size_t xn = 0; xn < nx; ++xn) next[xn] += mu[x] * row[xn];
    }
    out.push_back(Measure(std::move(next), 1e-9));
  }
  return MeasureFlow(std::move(out));
}

std::uint64_t MeasureFlow::tag() const {
  // FNV-1a over the raw bytes of every weight.
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& m : measures_) {
    for (double w : m.weights()) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &w, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
      }
    }
  }
  return h;
}

std::vector<StageKernels> flow_kernels(const GameModel& model, const MeasureFlow& flow) {
  std::vector<StageKernels> out;
  out.reserve(flow.size());
  for (const auto& m : flow.measures()) out.push_back(model.stage(m));
  return out;
}

}  // namespace mfg
