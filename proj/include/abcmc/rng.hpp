#pragma once

#include <cmath>
#include <cstdint>

#include "abcmc/numerics.hpp"

namespace abcmc {

// SplitMix64 finalizer, used for seeding and stream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Addressable randomness. Equal (root_seed, stream_id) pairs produce
// bit-identical draw sequences regardless of scheduling or thread count;
// distinct stream ids behave as independent streams.
struct SeedSpec {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_id = 0;

  SeedSpec child(std::uint64_t k) const {
    return {root_seed, mix64(stream_id ^ mix64(k))};
  }

  bool operator==(const SeedSpec&) const = default;
};

// xoshiro256** with SplitMix64 state expansion.
class RngStream {
 public:
  explicit RngStream(const SeedSpec& seed) {
    std::uint64_t sm = mix64(seed.root_seed) ^ mix64(~seed.stream_id);
    for (auto& word : state_) {
      sm += 0x9E3779B97F4A7C15ULL;
      word = mix64(sm);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Strictly inside (0,1): inverse-CDF transforms stay finite.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased draw from {0, ..., n-1}.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw DomainError("uniform_index: empty range");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = next_u64();
      const auto wide = static_cast<unsigned __int128>(x) * n;
      if (static_cast<std::uint64_t>(wide) >= threshold) {
        return static_cast<std::uint64_t>(wide >> 64);
      }
    }
  }

  double normal() { return std_normal_quantile(uniform01()); }

  double laplace(double location, double scale) {
    const double u = uniform01() - 0.5;
    const double sign = u < 0.0 ? -1.0 : 1.0;
    return location - scale * sign * std::log(1.0 - 2.0 * std::fabs(u));
  }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    // Split large means so exp(-mean) stays far from underflow.
    while (mean > 30.0) {
      total += poisson_knuth(30.0);
      mean -= 30.0;
    }
    return total + poisson_knuth(mean);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t poisson_knuth(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > limit);
    return k - 1;
  }

  std::uint64_t state_[4];
};

}  // namespace abcmc
