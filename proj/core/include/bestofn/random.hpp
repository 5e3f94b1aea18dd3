#pragma once

#include <cmath>
#include <cstdint>

namespace bestofn {

/// Deterministic 64-bit random stream used everywhere in the library.
///
/// The generator is xoshiro256** (Blackman & Vigna), seeded by expanding a
/// single 64-bit seed through splitmix64. Both algorithms are publicly
/// specified, so runs are reproducible bit-for-bit across platforms and
/// reimplementable in other languages. All derived draws (uniform doubles,
/// exponentials, normals) are defined below in terms of raw 64-bit outputs
/// only; no platform-dependent distribution code is involved.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
    // xoshiro must not start from the all-zero state.
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
      state_[0] = 0x9e3779b97f4a7c15ull;
  }

  std::uint64_t next_u64() noexcept {
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

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1].
  double uniform_open01() noexcept { return 1.0 - uniform01(); }

  /// Unbiased-to-2^-64 integer in [0, n). n must be >= 1.
  std::uint64_t uniform_below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Exponential draw with the given mean (inverse CDF of one uniform).
  double exponential(double mean) noexcept {
    return exponential_from_uniform(uniform_open01(), mean);
  }

  /// Gaussian draw via Box-Muller; consumes exactly two uniforms.
  double normal(double mean, double stddev) noexcept {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * radius * std::cos(6.283185307179586476925286766559 * u2);
  }

  bool bernoulli(double prob) noexcept { return uniform01() < prob; }

  /// Number of successes in m Bernoulli(prob) trials; consumes m uniforms.
  int binomial(int m, double prob) noexcept {
    int successes = 0;
    for (int i = 0; i < m; ++i) successes += bernoulli(prob) ? 1 : 0;
    return successes;
  }

  /// Inverse-CDF map from a uniform u in (0, 1] to an exponential with the
  /// given mean: -mean * ln(u). Exposed so tests can pin exact values.
  static double exponential_from_uniform(double u, double mean) noexcept {
    return -mean * std::log(u);
  }

  static std::uint64_t splitmix64(std::uint64_t& x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) noexcept {
    return (v << k) | (v >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace bestofn
