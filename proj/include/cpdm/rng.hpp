#pragma once

#include <cstdint>
#include <random>

namespace cpdm {

// Deterministic random source. mt19937_64 output is pinned by the standard,
// and the bounded draw below avoids std::uniform_int_distribution, whose
// mapping is implementation-defined and would break cross-platform replay.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Unbiased draw from [0, n). Rejection sampling on the low sliver.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t min = (0 - n) % n;  // 2^64 mod n
    std::uint64_t x = engine_();
    while (x < min) x = engine_();
    return x % n;
  }

  // Uniform in [0, 1), 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the spare value is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// splitmix64-style mixing, used to derive independent seeds (e.g. the bench
// instance generator vs. the algorithm run) from one user-facing seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace cpdm
