// Portable random helpers. std::mt19937_64's output sequence is fixed by
// the standard; the distributions below are written out so that results
// do not depend on the standard library implementation.

#ifndef XLPARSE_RNG_H_
#define XLPARSE_RNG_H_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace xlparse {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_below(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace xlparse

#endif  // XLPARSE_RNG_H_
