#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fairkit {

/// Deterministic random stream (splitmix64). Sampling is implemented here
/// rather than with <random> distributions so that seeded outputs are stable
/// across standard libraries; serialized artifacts and golden files depend on
/// that stability.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, 1).
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool next_bernoulli(double p) { return next_uniform() < p; }

  /// Normal draw via Box-Muller; always consumes exactly two uniforms so the
  /// stream position does not depend on the standard deviation.
  double next_normal(double stddev) {
    const double u1 = 1.0 - next_uniform();  // (0, 1]
    const double u2 = next_uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    return stddev * mag * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace fairkit
