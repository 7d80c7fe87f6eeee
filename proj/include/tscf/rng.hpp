#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace tscf {

// Deterministic random source. Every draw mapping is pinned here instead of
// delegating to std:: distributions, whose output sequences differ between
// standard library implementations; runs must be bit-reproducible from a seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer on [lo, hi], both ends inclusive.
  // Lemire multiply-shift; bias is < span/2^64 per draw, negligible here.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
    const unsigned __int128 prod = static_cast<unsigned __int128>(next_u64()) * span;
    return lo + static_cast<std::int64_t>(static_cast<std::uint64_t>(prod >> 64));
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Standard normal via Box-Muller. The pair's second value is discarded so
  // that one call always consumes exactly two uniforms (replayable stream).
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]; keeps log() finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Binomial(n, p) as an explicit sum of Bernoulli trials; n stays small
  // (at most twice a series length) so the O(n) cost is irrelevant.
  std::int64_t binomial(std::int64_t n, double p) {
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i) hits += bernoulli(p) ? 1 : 0;
    return hits;
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
};

// Stable per-instance seed derivation (splitmix64 finalizer over a
// golden-ratio stride). Lets independent work items share one master seed
// without overlapping streams, regardless of how many items run or in what
// order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace tscf
