#ifndef ETLRA_LEVERAGE_HPP
#define ETLRA_LEVERAGE_HPP

#include "etlra/common.hpp"
#include "etlra/random.hpp"
#include "etlra/sketch.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace etlra {

enum class LeverageMethod { Exact, Sketched };

/// Row leverage scores l_i = max_{y in colspan(M)} y_i^2 / ||y||^2.
struct LeverageScores {
  Vector scores;
  /// Sum of the scores; equals rank(M) for exact scores.
  double rank_estimate = 0.0;
  LeverageMethod method = LeverageMethod::Exact;
  /// Claimed multiplicative accuracy (1 for exact).
  double approximation_factor = 1.0;
  /// The sketched path could not form a basis and computed exact scores.
  bool fell_back = false;
};

struct LeverageConfig {
  /// Sketch rows = row_factor * t * ceil(log2 n), capped at n.
  Index row_factor = 8;
  /// Probe columns = probe_factor * ceil(log2 n).
  Index probe_factor = 2;
  Index max_width = 4096;
  double rank_cutoff = 1e-10;
};

namespace detail {

inline Index ceil_log2(Index n) {
  Index bits = 0;
  while ((Index{1} << bits) < n) ++bits;
  return std::max<Index>(bits, 1);
}

inline LeverageScores finish_scores(Vector scores, LeverageMethod method, double factor) {
  LeverageScores out;
  out.rank_estimate = scores.sum();
  out.scores = std::move(scores);
  out.method = method;
  out.approximation_factor = factor;
  return out;
}

}  // namespace detail

/// Squared row norms of an orthonormal basis of colspan(M), from a thin SVD
/// with relative rank cutoff.
inline LeverageScores exact_leverage(const Matrix& m, const LeverageConfig& cfg = {}) {
  if (m.cols() > cfg.max_width)
    throw ResourceError("exact_leverage: width " + std::to_string(m.cols()) + " above ceiling " +
                        std::to_string(cfg.max_width));
  Vector scores = Vector::Zero(m.rows());
  if (m.rows() > 0 && m.cols() > 0 && !m.isZero(0.0)) {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const Vector& sigma = svd.singularValues();
    Index q = 0;
    while (q < sigma.size() && sigma(q) > cfg.rank_cutoff * sigma(0)) ++q;
    scores = svd.matrixU().leftCols(q).rowwise().squaredNorm();
  }
  return detail::finish_scores(std::move(scores), LeverageMethod::Exact, 1.0);
}

/// Constant-factor leverage estimates in O(n t log n + poly(t)).
///
/// A Gaussian sketch Pi M (O(t log n) rows) yields a t x q map X with
/// M X close to orthonormal; row norms of M X, optionally compressed by a
/// Gaussian probe of O(log n) columns, estimate the scores. The probe is
/// skipped when it would not be narrower than q. Rank-deficient M is handled
/// by truncating the sketch's SVD, so U'' with repeated tensor coordinates
/// needs no fallback. Estimates are clipped at 1.
inline LeverageScores sketched_leverage(const Matrix& m, std::uint64_t seed,
                                        const LeverageConfig& cfg = {}) {
  const Index n = m.rows();
  const Index t = m.cols();
  if (t > cfg.max_width)
    throw ResourceError("sketched_leverage: width " + std::to_string(t) + " above ceiling " +
                        std::to_string(cfg.max_width));
  if (n == 0 || t == 0 || m.isZero(0.0))
    return detail::finish_scores(Vector::Zero(n), LeverageMethod::Sketched, 2.0);

  const Index logn = detail::ceil_log2(n);
  const Index rows = std::min(n, cfg.row_factor * t * logn);
  const GaussianSketch pi(rows, n, rng::hash(seed, 1));
  const Matrix sketched = pi.apply(m, Side::Left);

  Eigen::BDCSVD<Matrix> svd(sketched, Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  Index q = 0;
  if (sigma.size() > 0 && sigma(0) > 0.0)
    while (q < sigma.size() && sigma(q) > cfg.rank_cutoff * sigma(0)) ++q;
  if (q == 0) {
    LeverageScores exact = exact_leverage(m, cfg);
    exact.fell_back = true;
    return exact;
  }
  Matrix basis_map = svd.matrixV().leftCols(q) * sigma.head(q).cwiseInverse().asDiagonal();  // t x q

  const Index probe_cols = cfg.probe_factor * logn;
  if (probe_cols < q) {
    const GaussianSketch g(probe_cols, q, rng::hash(seed, 2));
    basis_map = g.apply(basis_map, Side::Right);  // t x probe_cols
  }
  Vector scores = (m * basis_map).rowwise().squaredNorm();
  scores = scores.cwiseMin(1.0);
  return detail::finish_scores(std::move(scores), LeverageMethod::Sketched, 2.0);
}

/// {i : scores[i] >= tau}, ascending.
inline std::vector<Index> threshold_support(const LeverageScores& ls, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ContractViolation("threshold_support: tau must lie in (0, 1]");
  std::vector<Index> out;
  for (Index i = 0; i < ls.scores.size(); ++i)
    if (ls.scores(i) >= tau) out.push_back(i);
  return out;
}

}  // namespace etlra

#endif  // ETLRA_LEVERAGE_HPP
