#ifndef ETLRA_SKETCH_HPP
#define ETLRA_SKETCH_HPP

#include "etlra/common.hpp"
#include "etlra/fft.hpp"
#include "etlra/random.hpp"
#include "etlra/tensoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace etlra {

enum class Side { Left, Right };

/// Dense Gaussian sketch with i.i.d. N(0, 1/m) entries.
///
/// Entry (i, j) depends only on (seed, i, j): two sketches with the same
/// seed and different sizes agree on their common block up to the 1/sqrt(m)
/// scale.
class GaussianSketch {
 public:
  GaussianSketch(Index sketch_dim, Index ambient_dim, std::uint64_t seed)
      : sketch_dim_(sketch_dim), ambient_dim_(ambient_dim), seed_(seed) {
    detail::require(sketch_dim >= 1 && ambient_dim >= 1,
                    "GaussianSketch: dimensions must be positive");
  }

  Index sketch_dim() const { return sketch_dim_; }
  Index ambient_dim() const { return ambient_dim_; }
  std::uint64_t seed() const { return seed_; }
  double scale() const { return 1.0 / std::sqrt(static_cast<double>(sketch_dim_)); }

  /// The m x ambient operator.
  Matrix matrix() const {
    Matrix s(sketch_dim_, ambient_dim_);
    const double sc = scale();
    for (Index j = 0; j < ambient_dim_; ++j)
      for (Index i = 0; i < sketch_dim_; ++i)
        s(i, j) = sc * rng::normal(rng::hash(seed_, static_cast<std::uint64_t>(i)),
                                   static_cast<std::uint64_t>(j));
    return s;
  }

  /// S M (Left, M has ambient rows) or M S^T (Right, M has ambient columns).
  Matrix apply(const Matrix& m, Side side) const {
    if (side == Side::Left) {
      detail::require(m.rows() == ambient_dim_,
                      "GaussianSketch: left operand must have " + std::to_string(ambient_dim_) +
                          " rows, got " + std::to_string(m.rows()));
      return matrix() * m;
    }
    detail::require(m.cols() == ambient_dim_,
                    "GaussianSketch: right operand must have " + std::to_string(ambient_dim_) +
                        " columns, got " + std::to_string(m.cols()));
    return m * matrix().transpose();
  }

 private:
  Index sketch_dim_;
  Index ambient_dim_;
  std::uint64_t seed_;
};

/// Degree-p TensorSketch: a linear map R^(r^p) -> R^m built from p
/// independent CountSketches h_t, s_t. The coordinate (j_1, ..., j_p) goes
/// to bucket (sum_t h_t(j_t)) mod m with sign prod_t s_t(j_t). Applied to
/// u (x) ... (x) u it equals the circular convolution of the p CountSketches
/// of u, which is what apply_row computes.
class TensorSketchOp {
 public:
  TensorSketchOp(Index m, int degree, Index base_dim, std::uint64_t seed)
      : m_(m), degree_(degree), base_dim_(base_dim), seed_(seed) {
    detail::require(m >= 1 && degree >= 1 && base_dim >= 1,
                    "TensorSketchOp: m, degree and base dimension must be positive");
    buckets_.assign(static_cast<std::size_t>(degree), std::vector<Index>(base_dim));
    signs_.assign(static_cast<std::size_t>(degree), std::vector<double>(base_dim));
    for (int t = 0; t < degree; ++t) {
      const std::uint64_t bucket_seed = rng::hash(seed, 2 * static_cast<std::uint64_t>(t));
      const std::uint64_t sign_seed = rng::hash(seed, 2 * static_cast<std::uint64_t>(t) + 1);
      for (Index i = 0; i < base_dim; ++i) {
        const auto key = static_cast<std::uint64_t>(i);
        buckets_[t][i] = static_cast<Index>(rng::hash(bucket_seed, key) % static_cast<std::uint64_t>(m));
        signs_[t][i] = (rng::hash(sign_seed, key) >> 63) ? 1.0 : -1.0;
      }
    }
  }

  /// Operator with explicit hash tables, one row per degree.
  static TensorSketchOp from_tables(Index m, std::vector<std::vector<Index>> buckets,
                                    std::vector<std::vector<double>> signs) {
    detail::require(!buckets.empty() && buckets.size() == signs.size(),
                    "TensorSketchOp: need one bucket and one sign table per degree");
    const Index r = static_cast<Index>(buckets.front().size());
    for (std::size_t t = 0; t < buckets.size(); ++t) {
      detail::require(static_cast<Index>(buckets[t].size()) == r &&
                          static_cast<Index>(signs[t].size()) == r,
                      "TensorSketchOp: hash tables must all have the base dimension");
      for (Index i = 0; i < r; ++i) {
        detail::require(buckets[t][i] >= 0 && buckets[t][i] < m, "TensorSketchOp: bucket out of range");
        detail::require(signs[t][i] == 1.0 || signs[t][i] == -1.0, "TensorSketchOp: signs must be +-1");
      }
    }
    TensorSketchOp op(m, static_cast<int>(buckets.size()), r, 0);
    op.buckets_ = std::move(buckets);
    op.signs_ = std::move(signs);
    return op;
  }

  Index sketch_dim() const { return m_; }
  int degree() const { return degree_; }
  Index base_dim() const { return base_dim_; }
  std::uint64_t seed() const { return seed_; }
  Index bucket(int t, Index i) const { return buckets_[t][i]; }
  double sign(int t, Index i) const { return signs_[t][i]; }

  /// CountSketch of u under the degree-t hash pair.
  Vector count_sketch(int t, const Eigen::Ref<const Vector>& u) const {
    detail::require(u.size() == base_dim_, "TensorSketchOp: vector length must equal r");
    Vector out = Vector::Zero(m_);
    for (Index i = 0; i < base_dim_; ++i) out(buckets_[t][i]) += signs_[t][i] * u(i);
    return out;
  }

  /// T (u (x) ... (x) u) in O(p (r + m log(p m))), never forming r^p entries.
  Vector apply_row(const Eigen::Ref<const Vector>& u) const {
    detail::require(u.size() == base_dim_, "TensorSketchOp: vector length must equal r");
    if (degree_ == 1) return count_sketch(0, u);

    // Linear convolution of p length-m sequences has p(m-1)+1 terms; fold
    // it mod m afterwards.
    const std::size_t linear_len = static_cast<std::size_t>(degree_) * static_cast<std::size_t>(m_ - 1) + 1;
    const std::size_t size = fft::next_pow2(linear_len);
    std::vector<fft::Complex> acc;
    std::vector<fft::Complex> spectrum(size);
    for (int t = 0; t < degree_; ++t) {
      std::fill(spectrum.begin(), spectrum.end(), fft::Complex{});
      for (Index i = 0; i < base_dim_; ++i) spectrum[buckets_[t][i]] += signs_[t][i] * u(i);
      fft::transform(spectrum, false);
      if (t == 0) {
        acc = spectrum;
      } else {
        for (std::size_t k = 0; k < size; ++k) acc[k] *= spectrum[k];
      }
    }
    fft::transform(acc, true);
    Vector out = Vector::Zero(m_);
    for (std::size_t k = 0; k < linear_len; ++k) out(static_cast<Index>(k % static_cast<std::size_t>(m_))) += acc[k].real();
    return out;
  }

  /// U''' = U'' T^T (n x m) from the base rows of U (n x r).
  Matrix apply_rows(const Matrix& u) const {
    detail::require(u.cols() == base_dim_, "TensorSketchOp: U must have r columns");
    Matrix out(u.rows(), m_);
    for (Index i = 0; i < u.rows(); ++i) out.row(i) = apply_row(u.row(i).transpose()).transpose();
    return out;
  }

  /// V''' = T V'' (m x d) from the base columns of V (r x d).
  Matrix apply_cols(const Matrix& v) const {
    detail::require(v.rows() == base_dim_, "TensorSketchOp: V must have r rows");
    Matrix out(m_, v.cols());
    for (Index j = 0; j < v.cols(); ++j) out.col(j) = apply_row(v.col(j));
    return out;
  }

 private:
  Index m_;
  int degree_;
  Index base_dim_;
  std::uint64_t seed_;
  std::vector<std::vector<Index>> buckets_;
  std::vector<std::vector<double>> signs_;
};

/// ||U'' T^T T V'' - U'' V''||_F / (||U''||_F ||V''||_F); 0 when both
/// factors vanish.
inline double approx_matrix_product_check(const TensoredFactor& left, const TensoredFactor& right,
                                          const TensorSketchOp& ts) {
  detail::require(left.orientation() == Orientation::RowsTensored &&
                      right.orientation() == Orientation::ColsTensored,
                  "approx_matrix_product_check: expects rows-tensored left, cols-tensored right");
  detail::require(left.degree() == ts.degree() && right.degree() == ts.degree(),
                  "approx_matrix_product_check: degree mismatch");
  const Matrix sketched = ts.apply_rows(left.base()) * ts.apply_cols(right.base());
  const Matrix exact = left.expanded() * right.expanded();
  const double denom = left.expanded().norm() * right.expanded().norm();
  if (denom == 0.0) return 0.0;
  return (sketched - exact).norm() / denom;
}

}  // namespace etlra

#endif  // ETLRA_SKETCH_HPP
