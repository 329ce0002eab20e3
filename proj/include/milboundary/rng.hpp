#pragma once

#include <cstdint>
#include <random>

namespace milb {

// Deterministic RNG. mt19937_64 output is fully specified by the standard;
// the helpers below avoid std::uniform_*_distribution, whose mapping is
// implementation-defined, so streams are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Derives an independent stream for (seed, index) via splitmix64 mixing.
  static Rng for_index(uint64_t seed, uint64_t index) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return Rng(z);
  }

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi] inclusive.
  int64_t next_int(int64_t lo, int64_t hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(next_u64() % span);
  }

  double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  bool next_bool() { return (next_u64() & 1u) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace milb
