#pragma once

#include <cstdint>
#include <random>

namespace cbm {

/// Seeded uniform generator. mt19937_64 output is mapped to doubles by hand
/// (std::uniform_real_distribution is implementation-defined), so identical
/// seeds produce identical streams on every platform.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  /// Uniform in [0, 1) with 53 random mantissa bits.
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Uniform integer in [0, n). Modulo bias is irrelevant at the sizes used
  /// here and keeps the stream layout fixed.
  std::uint64_t below(std::uint64_t n) { return n ? gen_() % n : 0; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cbm
