#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mfg/measure_flow.h"
#include "mfg/model.h"

// The end-to-end checks run by `mfg verify` and by the acceptance test binary.
namespace mfg::acceptance {

struct Options {
  std::filesystem::path models_dir;
  std::uint64_t seed = 12345;
  int threads = 0;  // 0: MFG_THREADS or 1
  // When false, criterion 11 is skipped (reported as not run, which fails).
  bool check_determinism = true;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;
};

// Output file name -> CSV text.
using Artifacts = std::map<std::string, std::string>;

struct SuiteResult {
  std::vector<CriterionResult> criteria;
  Artifacts artifacts;
  bool passed() const;
};

SuiteResult run_all(const Options& options);

// Re-creates the seeded simulation artifacts only (criteria 9 and 10).
Artifacts simulation_artifacts(const Options& options, int threads);

// "PASS  3  bellman contraction and monotonicity: ... (0.12 s)"
std::string format_line(const CriterionResult& r);

// Deterministic pseudo-random numbers for model generation, independent of
// the standard library's distribution implementations.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : state_(seed) {}
  double next();  // [0, 1)
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() * static_cast<double>(n)) % n; }

 private:
  std::uint64_t state_;
};

std::vector<double> random_distribution(Uniform& u, std::size_t n, double floor = 0.05);
// Tabular affine model with strictly positive kernels; `coupled` draws a
// separate kernel and cost per xbar.
std::shared_ptr<const TabularAffineModel> random_tabular(Uniform& u, std::size_t nx, std::size_t ny,
                                                         std::size_t na, bool coupled,
                                                         double discount = 0.9);
MeasureFlow random_flow(Uniform& u, const Measure& initial, int horizon);

}  // namespace mfg::acceptance
