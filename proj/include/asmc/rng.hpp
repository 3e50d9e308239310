#pragma once

#include <cmath>
#include <cstdint>

namespace asmc {

// Counter-based splittable 64-bit generator (splitmix64). Every run owns one
// stream and consumes it in a fixed, documented order:
//
//   generation step:  N resampling uniforms first, then the mutation draws
//                     particle by particle in output order.
//
// Replicate r of an experiment uses the stream seeded with master ^ r pushed
// through mix(). Normal deviates use Box-Muller and always consume exactly
// two uniforms, so paired runs that share a seed stay draw-for-draw aligned.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe under log().
  double uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Standard normal deviate; consumes exactly two uniforms.
  double normal() {
    double u = uniform_pos();
    double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(6.28318530717958647692528676655900577 * v);
  }

  // Seed scrambler used to derive independent per-replicate streams.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace asmc
