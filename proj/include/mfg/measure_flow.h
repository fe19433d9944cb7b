#pragma once

#include <cstdint>
#include <vector>

#include "mfg/model.h"

namespace mfg {

/// State-measure flow mu_0..mu_{T+1}. The extra entry past the horizon is
/// what the filter needs to evaluate observations at the last decision step.
class MeasureFlow {
 public:
  MeasureFlow() = default;
  explicit MeasureFlow(std::vector<Measure> measures);

  // mu_t = initial for every t.
  static MeasureFlow constant(const Measure& initial, int horizon);
  // Marginals of the chain that always plays `action`, each step evaluated at its own entry.
  static MeasureFlow recursive_from_initial(const GameModel& model, int horizon,
                                            std::size_t action = 0);

  int horizon() const { return static_cast<int>(measures_.size()) - 2; }
  std::size_t size() const { return measures_.size(); }
  const Measure& operator[](std::size_t t) const { return measures_[t]; }
  const std::vector<Measure>& measures() const { return measures_; }

  // Content hash of the weights; identifies which flow a policy was solved against.
  std::uint64_t tag() const;

  bool operator==(const MeasureFlow&) const = default;

 private:
  std::vector<Measure> measures_;
};

// Kernels of `model` evaluated along every entry of `flow`.
std::vector<StageKernels> flow_kernels(const GameModel& model, const MeasureFlow& flow);

}  // namespace mfg
