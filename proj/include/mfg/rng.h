#pragma once

#include <cstdint>
#include <span>

namespace mfg::rng {

// Substream kinds used by the simulator.
enum class Stream : std::uint64_t { initial = 1, transition = 2, observation = 3, policy = 4 };

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Splitting rule: fold (seed, replication, agent, time, stream) through
// splitmix64 one coordinate at a time. Every draw is a pure function of its
// coordinates, so results do not depend on evaluation order or thread count.
constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t rep, std::uint64_t agent,
                            std::uint64_t t, Stream s) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ rep);
  h = splitmix64(h ^ agent);
  h = splitmix64(h ^ t);
  return splitmix64(h ^ static_cast<std::uint64_t>(s));
}

// Uniform in [0,1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw from a probability vector.
std::size_t sample_discrete(std::span<const double> probs, double u);

inline constexpr const char* kSplittingRule =
    "u = to_unit(splitmix64(splitmix64(splitmix64(splitmix64(splitmix64(seed) ^ rep) ^ agent) ^ t) "
    "^ stream)), stream in {initial=1, transition=2, observation=3, policy=4}";

}  // namespace mfg::rng
