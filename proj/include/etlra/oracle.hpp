#ifndef ETLRA_ORACLE_HPP
#define ETLRA_ORACLE_HPP

#include "etlra/common.hpp"
#include "etlra/lra.hpp"
#include "etlra/sketch.hpp"
#include "etlra/tensoring.hpp"
#include "etlra/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

// Brute-force references. Everything here materializes f(UV) and uses its own
// one-sided Jacobi SVD, so it shares no numerical path with the sketching
// algorithms it checks.

namespace etlra::oracle {

using DenseMatrix = Matrix;

/// M = left * diag(singular) * right^T, singular values descending.
struct Svd {
  Matrix left;
  Vector singular;
  Matrix right;
};

/// One-sided (Hestenes) Jacobi SVD. Sweeps until every column pair is
/// orthogonal to `tol` relative to the product of their norms.
inline Svd jacobi_svd(const Matrix& m, double tol = 1e-12, int max_sweeps = 80) {
  if (m.rows() < m.cols()) {
    Svd t = jacobi_svd(m.transpose(), tol, max_sweeps);
    return Svd{std::move(t.right), std::move(t.singular), std::move(t.left)};
  }
  const Index rows = m.rows();
  const Index cols = m.cols();
  Matrix a = m;
  Matrix v = Matrix::Identity(cols, cols);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < cols; ++p) {
      for (Index q = p + 1; q < cols; ++q) {
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double gamma = a.col(p).dot(a.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Index i = 0; i < rows; ++i) {
          const double ap = a(i, p);
          const double aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (Index i = 0; i < cols; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<Index> order(static_cast<std::size_t>(cols));
  std::iota(order.begin(), order.end(), Index{0});
  Vector norms(cols);
  for (Index j = 0; j < cols; ++j) norms(j) = a.col(j).norm();
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return norms(x) > norms(y); });

  Svd out{Matrix::Zero(rows, cols), Vector(cols), Matrix(cols, cols)};
  for (Index j = 0; j < cols; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    out.singular(j) = norms(src);
    if (norms(src) > 0.0) out.left.col(j) = a.col(src) / norms(src);
    out.right.col(j) = v.col(src);
  }
  return out;
}

/// f(UV) entry by entry.
inline DenseMatrix materialize(const FactoredMatrix& fm, const ScalarTransform& t,
                               const Limits& limits = Limits::from_env()) {
  const auto entries = static_cast<std::uint64_t>(fm.rows()) * static_cast<std::uint64_t>(fm.cols());
  if (entries > limits.oracle_max_entries)
    throw ResourceError("oracle::materialize: " + std::to_string(entries) +
                        " entries exceed the oracle ceiling of " +
                        std::to_string(limits.oracle_max_entries));
  const Index n = fm.rows();
  const Index d = fm.cols();
  const Index r = fm.inner();
  const Matrix ut = fm.u().transpose();
  DenseMatrix out(n, d);
  for (Index j = 0; j < d; ++j) {
    const double* vj = fm.v().col(j).data();
    for (Index i = 0; i < n; ++i) {
      const double* ui = ut.col(i).data();
      double dot = 0.0;
      for (Index c = 0; c < r; ++c) dot += ui[c] * vj[c];
      out(i, j) = t(dot);
    }
  }
  return out;
}

/// sum_{i > k} sigma_i^2.
inline double best_rank_k_error(const DenseMatrix& m, Index k) {
  if (k < 0 || k > std::min(m.rows(), m.cols()))
    throw DimensionError("oracle::best_rank_k_error: k must lie in [0, min(n, d)]");
  const Vector sigma = jacobi_svd(m).singular;
  double tail = 0.0;
  for (Index i = sigma.size() - 1; i >= k; --i) tail += sigma(i) * sigma(i);
  return tail;
}

/// ||M - left * right||_F^2.
inline double eval_error(const DenseMatrix& m, const Matrix& left, const Matrix& right) {
  if (left.rows() != m.rows() || right.cols() != m.cols() || left.cols() != right.rows())
    throw DimensionError("oracle::eval_error: factor shapes do not conform to M");
  return (m - left * right).squaredNorm();
}

inline double eval_error(const DenseMatrix& m, const RankKFactors& rk) {
  return eval_error(m, rk.left, rk.right);
}

/// Best rank-k factors of M from the exact SVD; directions with
/// sigma <= cutoff * sigma_1 are dropped (output is still k wide).
inline RankKFactors truncate(const DenseMatrix& m, Index k, double cutoff = 1e-12) {
  const Svd svd = jacobi_svd(m);
  RankKFactors out;
  out.k = k;
  out.left = Matrix::Zero(m.rows(), k);
  out.right = Matrix::Zero(k, m.cols());
  const Index avail = std::min<Index>(k, svd.singular.size());
  for (Index j = 0; j < avail; ++j) {
    if (svd.singular(j) <= cutoff * svd.singular(0) || svd.singular(j) == 0.0) break;
    out.left.col(j) = svd.left.col(j) * svd.singular(j);
    out.right.row(j) = svd.right.col(j).transpose();
  }
  return out;
}

/// Numerical rank with relative cutoff.
inline Index rank(const Matrix& m, double cutoff = 1e-10) {
  const Vector sigma = jacobi_svd(m).singular;
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  Index count = 0;
  while (count < sigma.size() && sigma(count) > cutoff * sigma(0)) ++count;
  return count;
}

/// Leverage scores from the exact SVD: squared row norms of the left
/// singular vectors with sigma above cutoff.
inline Vector leverage_scores(const Matrix& m, double cutoff = 1e-10) {
  const Svd svd = jacobi_svd(m);
  Vector scores = Vector::Zero(m.rows());
  if (svd.singular.size() == 0 || svd.singular(0) == 0.0) return scores;
  for (Index j = 0; j < svd.singular.size(); ++j) {
    if (svd.singular(j) <= cutoff * svd.singular(0)) break;
    scores += svd.left.col(j).cwiseAbs2();
  }
  return scores;
}

/// The m x r^p matrix of a TensorSketch, rebuilt from its hash tables:
/// column (j_1..j_p) holds prod_t s_t(j_t) in row (sum_t h_t(j_t)) mod m.
inline Matrix materialize_tensorsketch(const TensorSketchOp& ts, const Limits& limits = Limits::from_env()) {
  const Index r = ts.base_dim();
  const int p = ts.degree();
  const Index width = tensored_width(r, p, ts.sketch_dim(), limits);
  Matrix out = Matrix::Zero(ts.sketch_dim(), width);
  std::vector<Index> digits(static_cast<std::size_t>(p), 0);
  for (Index flat = 0; flat < width; ++flat) {
    Index rem = flat;
    for (int t = p - 1; t >= 0; --t) {
      digits[static_cast<std::size_t>(t)] = rem % r;
      rem /= r;
    }
    Index bucket = 0;
    double sign = 1.0;
    for (int t = 0; t < p; ++t) {
      bucket += ts.bucket(t, digits[static_cast<std::size_t>(t)]);
      sign *= ts.sign(t, digits[static_cast<std::size_t>(t)]);
    }
    out(bucket % ts.sketch_dim(), flat) = sign;
  }
  return out;
}

/// ||(I - W W^T) M e_j||^2 for every column j, computed densely.
inline Vector column_residuals(const DenseMatrix& m, const Matrix& w) {
  const Matrix resid = m - w * (w.transpose() * m);
  return resid.colwise().squaredNorm().transpose();
}

}  // namespace etlra::oracle

#endif  // ETLRA_ORACLE_HPP
