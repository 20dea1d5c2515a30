#pragma once

#include <cmath>
#include <cstdint>

namespace membrane {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256++ seeded through splitmix64. Replica r of experiment e uses
// Rng::derive(seed, r), which is reproducible independently of thread
// scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : state_) s = splitmix64(sm);
  }

  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t sm = seed;
    std::uint64_t a = splitmix64(sm);
    std::uint64_t mix = a ^ (stream + 0x9e3779b97f4a7c15ull) * 0xda942042e4dd58b5ull;
    return Rng(mix ^ splitmix64(sm));
  }

  std::uint64_t next_u64() {
    auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}, unbiased by rejection.
  int next_below(int n) {
    const std::uint64_t bound = ~0ull - ~0ull % static_cast<std::uint64_t>(n);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= bound);
    return static_cast<int>(v % static_cast<std::uint64_t>(n));
  }

  // Standard normal via Box-Muller (pair cached).
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1, u2;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace membrane
