#ifndef ETLRA_TENSORING_HPP
#define ETLRA_TENSORING_HPP

#include "etlra/common.hpp"

#include <string>

// p-fold Khatri-Rao (row-tensoring) expansion. A rows-tensored factor of U
// (n x r) is the n x r^p matrix whose row i is U_i (x) ... (x) U_i; the
// cols-tensored factor of V (r x d) is the column analogue. Both use the same
// lexicographic flat index: coordinate (j_1, ..., j_p) sits at
// sum_t j_t * r^(p - t), so <U''_i, V''_j> = <U_i, V_j>^p.

namespace etlra {

enum class Orientation { RowsTensored, ColsTensored };

class TensoredFactor {
 public:
  TensoredFactor(Matrix base, Matrix expanded, int degree, Orientation orientation)
      : base_(std::move(base)),
        expanded_(std::move(expanded)),
        degree_(degree),
        orientation_(orientation) {}

  const Matrix& base() const { return base_; }
  const Matrix& expanded() const { return expanded_; }
  int degree() const { return degree_; }
  Orientation orientation() const { return orientation_; }

  /// r, the untensored inner dimension.
  Index base_width() const {
    return orientation_ == Orientation::RowsTensored ? base_.cols() : base_.rows();
  }
  /// r^p.
  Index width() const {
    return orientation_ == Orientation::RowsTensored ? expanded_.cols() : expanded_.rows();
  }
  /// n for rows-tensored, d for cols-tensored.
  Index count() const {
    return orientation_ == Orientation::RowsTensored ? expanded_.rows() : expanded_.cols();
  }

 private:
  Matrix base_;
  Matrix expanded_;
  int degree_;
  Orientation orientation_;
};

namespace detail {

/// out = in (x) row, where out has in.size() * row.size() entries.
template <typename In, typename Row>
void kron_accumulate(const In& in, const Row& row, Eigen::Ref<Vector> out) {
  const Index r = row.size();
  for (Index a = 0; a < in.size(); ++a) {
    const double head = in(a);
    for (Index b = 0; b < r; ++b) out(a * r + b) = head * row(b);
  }
}

}  // namespace detail

/// r^p, or a ResourceError when `count` vectors of that width would exceed
/// the memory ceiling.
inline Index tensored_width(Index r, int p, Index count, const Limits& limits = Limits::from_env()) {
  detail::require(r >= 1, "tensoring: base width must be positive");
  detail::require(p >= 1, "tensoring: degree must be at least 1");
  const std::uint64_t width = detail::checked_pow(static_cast<std::uint64_t>(r), p);
  const std::uint64_t rows = static_cast<std::uint64_t>(std::max<Index>(count, 1));
  if (width == 0 || width > limits.memory_ceiling_bytes / sizeof(double) / rows) {
    throw ResourceError("tensoring: r^p = " + std::to_string(r) + "^" + std::to_string(p) +
                        " over the memory ceiling for " + std::to_string(rows) + " vectors");
  }
  return static_cast<Index>(width);
}

/// u (x) ... (x) u, p times.
inline Vector expand_vector(const Eigen::Ref<const Vector>& u, int p,
                            const Limits& limits = Limits::from_env()) {
  const Index width = tensored_width(u.size(), p, 1, limits);
  Vector out(width);
  Vector scratch(width);
  out.head(u.size()) = u;
  Index len = u.size();
  for (int pass = 1; pass < p; ++pass) {
    scratch.head(len) = out.head(len);
    detail::kron_accumulate(scratch.head(len), u, out.head(len * u.size()));
    len *= u.size();
  }
  return out;
}

/// Materialized p-fold expansion of every row (RowsTensored) or column
/// (ColsTensored) of `base`.
inline TensoredFactor expand(const Matrix& base, int p, Orientation orientation,
                             const Limits& limits = Limits::from_env()) {
  const bool by_rows = orientation == Orientation::RowsTensored;
  const Index r = by_rows ? base.cols() : base.rows();
  const Index count = by_rows ? base.rows() : base.cols();
  const Index width = tensored_width(r, p, count, limits);

  Matrix expanded = by_rows ? Matrix(count, width) : Matrix(width, count);
  Vector current(width);
  Vector scratch(width);
  Vector item(r);
  for (Index i = 0; i < count; ++i) {
    item = by_rows ? Vector(base.row(i).transpose()) : Vector(base.col(i));
    current.head(r) = item;
    Index len = r;
    for (int pass = 1; pass < p; ++pass) {
      scratch.head(len) = current.head(len);
      detail::kron_accumulate(scratch.head(len), item, current.head(len * r));
      len *= r;
    }
    if (by_rows)
      expanded.row(i) = current.transpose();
    else
      expanded.col(i) = current;
  }
  return TensoredFactor(base, std::move(expanded), p, orientation);
}

/// U''(V'' z) = (UV)^{o p} z in O((n + d) r^p).
inline Vector tensored_matvec(const TensoredFactor& left, const TensoredFactor& right,
                              const Eigen::Ref<const Vector>& z) {
  detail::require(left.orientation() == Orientation::RowsTensored &&
                      right.orientation() == Orientation::ColsTensored,
                  "tensored_matvec: expects a rows-tensored left and cols-tensored right factor");
  detail::require(left.degree() == right.degree(), "tensored_matvec: degree mismatch");
  detail::require(left.width() == right.width(), "tensored_matvec: inner dimension mismatch");
  detail::require(z.size() == right.count(), "tensored_matvec: vector length must equal d");
  const Vector inner = right.expanded() * z;
  return left.expanded() * inner;
}

}  // namespace etlra

#endif  // ETLRA_TENSORING_HPP
