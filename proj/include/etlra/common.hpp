#ifndef ETLRA_COMMON_HPP
#define ETLRA_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace etlra {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or indices that do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed a configured memory or size ceiling.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// The requested transform has no supported path for this operation.
class UnsupportedTransform : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied object violates a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Size guards shared by every module that may allocate r^p-wide or n*d
/// dense objects.
struct Limits {
  static constexpr const char* kMemoryCeilingEnv = "ETLRA_MEMORY_CEILING";

  std::uint64_t memory_ceiling_bytes = std::uint64_t{2} << 30;
  int max_implicit_degree = 12;
  std::uint64_t oracle_max_entries = 10'000'000;

  /// Defaults, with the memory ceiling overridden by ETLRA_MEMORY_CEILING
  /// (bytes) when that variable holds a positive integer.
  static Limits from_env() {
    Limits limits;
    if (const char* raw = std::getenv(kMemoryCeilingEnv)) {
      char* end = nullptr;
      const unsigned long long value = std::strtoull(raw, &end, 10);
      if (end != raw && *end == '\0' && value > 0) limits.memory_ceiling_bytes = value;
    }
    return limits;
  }
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DimensionError(message);
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// r^p with overflow detection; returns 0 on overflow.
inline std::uint64_t checked_pow(std::uint64_t base, int exponent) {
  std::uint64_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && result > UINT64_MAX / base) return 0;
    result *= base;
  }
  return result;
}

}  // namespace detail
}  // namespace etlra

#endif  // ETLRA_COMMON_HPP
