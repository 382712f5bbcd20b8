#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace funreg {

// SplitMix64 step: advances the state and returns a mixed 64-bit value.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from (seed, stream). Both arguments go
// through full mixing rounds so that nearby indices give unrelated streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64_next(s);
  s = a ^ (stream * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
  std::uint64_t b = splitmix64_next(s);
  return b;
}

// Deterministic generator with splittable substreams. All draws are built
// from SplitMix64 output, so results do not depend on the platform's
// standard-library distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  // Independent stream derived from the given root seed and stream index.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix_seed(seed, stream));
  }

  // Independent child stream derived from this generator's own seed.
  // Children ignore how much of the parent has been consumed.
  Rng child(std::uint64_t stream) const { return substream(seed_, stream); }

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Two uniforms per draw, no cached state.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace funreg
