#pragma once

#include <cstdint>
#include <random>

namespace ring_march {

// Deterministic draw stream. Every random decision in the simulator flows
// through this wrapper so that a run is reproducible across platforms:
// mt19937_64 is fully specified by the standard, and the derived draws below
// use only its raw 64-bit output (std::uniform_real_distribution and friends
// are implementation-defined and must not be used here).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0,1), 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Consumes no draw for prob <= 0 or >= 1.
  bool bernoulli(double prob) {
    if (prob <= 0.0) return false;
    if (prob >= 1.0) return true;
    return uniform01() < prob;
  }

  // Fair bit.
  bool coin() { return (next_u64() >> 63) != 0; }

  // Unbiased uniform index in [0, count) via rejection sampling.
  // Consumes no draw when count <= 1.
  std::uint32_t pick(std::uint32_t count) {
    if (count <= 1) return 0;
    const std::uint64_t c = count;
    const std::uint64_t threshold = (0 - c) % c;  // 2^64 mod count
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return static_cast<std::uint32_t>(r % c);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace ring_march
