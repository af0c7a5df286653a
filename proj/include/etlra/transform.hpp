#ifndef ETLRA_TRANSFORM_HPP
#define ETLRA_TRANSFORM_HPP

#include "etlra/common.hpp"
#include "etlra/tensoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace etlra {

enum class TransformKind { Power, AbsPower, Log1pAbs };

/// Entrywise scalar function f applied to U*V.
class ScalarTransform {
 public:
  static ScalarTransform power(int p) { return ScalarTransform(TransformKind::Power, p); }
  static ScalarTransform abs_power(int p) { return ScalarTransform(TransformKind::AbsPower, p); }
  static ScalarTransform log1p_abs() { return ScalarTransform(TransformKind::Log1pAbs, 1); }

  TransformKind kind() const { return kind_; }
  /// Degree p; 1 for Log1pAbs.
  int degree() const { return degree_; }

  bool is_even_function() const {
    return kind_ != TransformKind::Power || degree_ % 2 == 0;
  }
  /// Only x^p has an exact Khatri-Rao linearization.
  bool admits_linearization() const { return kind_ == TransformKind::Power; }

  double operator()(double x) const {
    switch (kind_) {
      case TransformKind::Power:
        return ipow(x, degree_);
      case TransformKind::AbsPower:
        return ipow(std::abs(x), degree_);
      case TransformKind::Log1pAbs:
        return std::log1p(std::abs(x));
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind_) {
      case TransformKind::Power:
        return "power(" + std::to_string(degree_) + ")";
      case TransformKind::AbsPower:
        return "abs_power(" + std::to_string(degree_) + ")";
      case TransformKind::Log1pAbs:
        return "log1p_abs";
    }
    return "unknown";
  }

  /// Exponentiation by squaring; exact for small integer arguments.
  static double ipow(double x, int p) {
    double result = 1.0;
    double base = x;
    for (unsigned e = static_cast<unsigned>(p); e != 0; e >>= 1) {
      if (e & 1u) result *= base;
      base *= base;
    }
    return result;
  }

 private:
  ScalarTransform(TransformKind kind, int degree) : kind_(kind), degree_(degree) {
    if (degree < 1) throw ContractViolation("ScalarTransform: degree must be a positive integer");
  }

  TransformKind kind_;
  int degree_;
};

/// The implicit matrix f(U V) held as its factors U (n x r) and V (r x d).
class FactoredMatrix {
 public:
  FactoredMatrix(Matrix u, Matrix v) : u_(std::move(u)), v_(std::move(v)) {
    detail::require(u_.rows() >= 1 && u_.cols() >= 1 && v_.cols() >= 1,
                    "FactoredMatrix: n, r and d must be positive");
    detail::require(u_.cols() == v_.rows(), "FactoredMatrix: U has " + std::to_string(u_.cols()) +
                                                " columns but V has " + std::to_string(v_.rows()) +
                                                " rows");
    if (!u_.allFinite() || !v_.allFinite())
      throw ContractViolation("FactoredMatrix: factors must be finite");
  }

  const Matrix& u() const { return u_; }
  const Matrix& v() const { return v_; }
  Index rows() const { return u_.rows(); }
  Index cols() const { return v_.cols(); }
  Index inner() const { return u_.cols(); }

 private:
  Matrix u_;
  Matrix v_;
};

/// f(<U_i, V_j>) in O(r).
inline double entry(const FactoredMatrix& fm, const ScalarTransform& t, Index i, Index j) {
  if (i < 0 || i >= fm.rows() || j < 0 || j >= fm.cols())
    throw DimensionError("entry: index (" + std::to_string(i) + ", " + std::to_string(j) +
                         ") outside " + std::to_string(fm.rows()) + " x " +
                         std::to_string(fm.cols()));
  double dot = 0.0;
  for (Index c = 0; c < fm.inner(); ++c) dot += fm.u()(i, c) * fm.v()(c, j);
  return t(dot);
}

enum class MatvecMode { Dense, Implicit };

struct MatvecOptions {
  Index block_rows = 256;
  Limits limits = Limits::from_env();
};

/// f(U V) z.
///
/// Dense mode streams f(UV) one row at a time in blocks of block_rows and
/// holds O(d + r) scratch; each output entry is summed over j in
/// ascending order. Implicit mode applies the degree-p Khatri-Rao
/// linearization and costs O((n + d) r^p); it exists only for Power(p).
inline Vector transformed_matvec(const FactoredMatrix& fm, const ScalarTransform& t,
                                 const Eigen::Ref<const Vector>& z, MatvecMode mode,
                                 const MatvecOptions& options = {}) {
  detail::require(z.size() == fm.cols(), "transformed_matvec: z must have length d = " +
                                             std::to_string(fm.cols()));
  if (mode == MatvecMode::Implicit) {
    if (!t.admits_linearization())
      throw UnsupportedTransform("transformed_matvec: implicit mode has no linearization for " +
                                 t.name());
    if (t.degree() > options.limits.max_implicit_degree)
      throw ResourceError("transformed_matvec: degree " + std::to_string(t.degree()) +
                          " above the implicit-mode cap of " +
                          std::to_string(options.limits.max_implicit_degree));
    const auto left = expand(fm.u(), t.degree(), Orientation::RowsTensored, options.limits);
    const auto right = expand(fm.v(), t.degree(), Orientation::ColsTensored, options.limits);
    return tensored_matvec(left, right, z);
  }

  const Index n = fm.rows();
  const Index d = fm.cols();
  const Index block = std::max<Index>(1, options.block_rows);
  Vector out(n);
  Eigen::RowVectorXd row(d);
  for (Index start = 0; start < n; start += block) {
    const Index stop = std::min(n, start + block);
    for (Index i = start; i < stop; ++i) {
      row.noalias() = fm.u().row(i) * fm.v();
      double acc = 0.0;
      for (Index j = 0; j < d; ++j) acc += t(row(j)) * z(j);
      out(i) = acc;
    }
  }
  return out;
}

}  // namespace etlra

#endif  // ETLRA_TRANSFORM_HPP
