// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
#include <cstdio>
#include <cstdlib>

#include "mfg/acceptance.h"

int main(int argc, char** argv) {
  mfg::acceptance::Options options;
  options.models_dir = argc > 1 ? argv[1] : MFG_MODELS_DIR;
  if (const char* seed = std::getenv("MFG_SEED")) options.seed = std::strtoull(seed, nullptr, 10);
  const auto suite = mfg::acceptance::run_all(options);
  for (const auto& c : suite.criteria) std::printf("%s\n", mfg::acceptance::format_line(c).c_str());
  std::printf("%s\n", suite.passed() ? "all criteria passed" : "some criteria FAILED");
  return suite.passed() ? 0 : 1;
}
