#pragma once

// Seedable random stream. Draws are implemented directly on top of the
// mt19937_64 output (rejection sampling for bounded ints) instead of
// std::uniform_int_distribution, whose mapping is implementation-defined;
// this keeps every seeded run reproducible across toolchains.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace bpmstp {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    return lo + (int)bounded((std::uint64_t)(hi - lo) + 1);
  }

  // Uniform index in [0, n).
  std::size_t pick_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("pick_index: empty set");
    return (std::size_t)bounded(n);
  }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[pick_index(v.size())];
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[pick_index(i)]);
  }

 private:
  // Unbiased draw from [0, n) by rejecting the tail of the 64-bit range.
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("bounded: n must be positive");
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  std::mt19937_64 gen_;
};

} // namespace bpmstp
