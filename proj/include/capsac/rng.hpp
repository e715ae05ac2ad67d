#pragma once

#include <cstdint>
#include <random>

namespace capsac {

// mt19937_64 with draw helpers that avoid std::uniform_*_distribution,
// whose output is implementation-defined. Same seed, same stream, everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform integer in [lo, hi], inclusive. Rejection sampling keeps it unbiased.
  int uniform_int(int lo, int hi) {
    if (lo >= hi) return lo;
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform_int(0, static_cast<int>(n) - 1));
  }

  // Uniform double in [0, 1).
  double uniform_real() { return (eng_() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace capsac
