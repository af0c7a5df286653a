#ifndef ETLRA_RANDOM_HPP
#define ETLRA_RANDOM_HPP

#include "etlra/common.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

// Counter-based randomness. Every draw is a pure function of (seed, key), so
// operators can be regenerated bitwise-identically on any platform and any
// block of a sketch can be produced independently of the rest.

namespace etlra::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t key) {
  return mix64(mix64(seed) ^ (key * 0xd6e8feb86659fd93ULL + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return hash(hash(seed, a), b);
}

/// Uniform in (0, 1], 53-bit resolution.
inline double to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Standard normal draw at (seed, key) via Box-Muller.
inline double normal(std::uint64_t seed, std::uint64_t key) {
  const double u1 = to_unit(hash(seed, key, 0));
  const double u2 = to_unit(hash(seed, key, 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential generator for instance construction.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed) : seed_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return UINT64_MAX; }

  result_type operator()() { return hash(seed_, counter_++); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * (to_unit((*this)()) - 0x1.0p-53); }
  double normal() { return rng::normal(seed_, counter_++); }
  int sign() { return ((*this)() >> 63) ? 1 : -1; }
  bool coin(double p_true) { return to_unit((*this)()) <= p_true; }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return (*this)() % bound; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// rows x cols matrix with i.i.d. uniform [lo, hi] entries.
inline Matrix uniform_matrix(Index rows, Index cols, std::uint64_t seed, double lo = -1.0,
                             double hi = 1.0) {
  Stream s(seed);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = s.uniform(lo, hi);
  return m;
}

inline Vector sign_vector(Index n, std::uint64_t seed) {
  Stream s(seed);
  Vector c(n);
  for (Index i = 0; i < n; ++i) c(i) = s.sign();
  return c;
}

}  // namespace etlra::rng

#endif  // ETLRA_RANDOM_HPP
