#ifndef ETLRA_LRA_HPP
#define ETLRA_LRA_HPP

#include "etlra/common.hpp"
#include "etlra/random.hpp"
#include "etlra/sketch.hpp"
#include "etlra/tensoring.hpp"
#include "etlra/transform.hpp"

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

// Rank-k approximation of (UV)^{o p} for even p, from the factors alone.
//
// Both algorithms reduce to the same sketch-and-solve core. Given a left
// sketch S (rows), a right sketch R (columns) and the target A:
//
//   P       orthonormal basis of rowspace(S A R)
//   [A R P]_k = L Y        (exact truncated SVD, L is n x k)
//   output  L,  Y P^T (S A R)^+ S A
//
// which is the rank-k Z minimizing ||Z S A R - A R||_F. relative_lra takes A
// as U''V'' via the explicit Khatri-Rao factors; additive_lra replaces them
// with their TensorSketches U''' = U'' T^T and V''' = T V'' so nothing of
// width r^p is ever formed.

namespace etlra {

struct StageTimes {
  double expand = 0.0;
  double sketch = 0.0;
  double solve = 0.0;
  double verify = 0.0;
};

/// Rank-k output (left n x k, right k x d).
struct RankKFactors {
  Matrix left;
  Matrix right;
  Index k = 0;
  /// ||left * right - f(UV)||_F^2; filled only by an oracle.
  std::optional<double> achieved_error;
  /// k >= r^p: the exact linearization was returned, zero-padded to width k.
  bool degenerate = false;
  /// Oracle-free estimate of the squared error used to pick between
  /// repetitions.
  double surrogate_error = 0.0;
  int repetition = 0;
  StageTimes timings;
};

/// Orthonormal basis of the column space of a left factor.
struct ProjectionOutput {
  Matrix w;
  Index requested = 0;
  /// The left factor had rank below `requested`; w is narrower.
  bool rank_deficient = false;
};

enum class RightWidthRule { Min, KOverEpsCubed };

struct LraConfig {
  std::optional<Index> rows_s;    // mS
  std::optional<Index> cols_r;    // mR
  std::optional<Index> tensor_m;  // mT
  RightWidthRule right_width = RightWidthRule::Min;
  /// Independent sketch draws; the one with the smallest surrogate error wins.
  int repetitions = 3;
  /// Columns of the Gaussian probe used for the surrogate error.
  Index probe_width = 16;
  double pinv_cutoff = 1e-10;
  Limits limits = Limits::from_env();
};

namespace sketch_dims {

inline Index ceil_index(double x) { return static_cast<Index>(std::ceil(x - 1e-12)); }

/// 4 ceil(k / eps).
inline Index left_rows(Index k, double eps) { return 4 * ceil_index(static_cast<double>(k) / eps); }

/// 4 ceil(min(k / eps^3, width / eps^2)); `width` is r^p for relative_lra and
/// mT for additive_lra.
inline Index right_cols(Index k, double eps, double width, RightWidthRule rule) {
  const double by_k = static_cast<double>(k) / (eps * eps * eps);
  if (rule == RightWidthRule::KOverEpsCubed) return 4 * ceil_index(by_k);
  return 4 * ceil_index(std::min(by_k, width / (eps * eps)));
}

/// ceil(8 p / eps^2).
inline Index tensor_rows(int p, double eps) { return ceil_index(8.0 * p / (eps * eps)); }

}  // namespace sketch_dims

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

enum SeedTag : std::uint64_t { kSeedS = 1, kSeedR = 2, kSeedT = 3, kSeedProbe = 4 };

inline void validate_lra_args(int p, Index k, double eps, const char* who) {
  if (p < 1) throw ContractViolation(std::string(who) + ": degree must be positive");
  if (k < 1) throw ContractViolation(std::string(who) + ": rank k must be positive");
  if (!(eps > 0.0)) throw ContractViolation(std::string(who) + ": eps must be positive");
}

/// Pad `m` with zero columns (or rows) up to `k`.
inline Matrix pad_cols(const Matrix& m, Index k) {
  Matrix out = Matrix::Zero(m.rows(), k);
  out.leftCols(std::min(k, m.cols())) = m.leftCols(std::min(k, m.cols()));
  return out;
}
inline Matrix pad_rows(const Matrix& m, Index k) {
  Matrix out = Matrix::Zero(k, m.cols());
  out.topRows(std::min(k, m.rows())) = m.topRows(std::min(k, m.rows()));
  return out;
}

/// Rank-k Z minimizing ||Z SAR - AR||_F, returned as Z SA = left * right.
inline RankKFactors sketch_solve(const Matrix& ar, const Matrix& sa, const Matrix& sar, Index k,
                                 double cutoff) {
  Eigen::BDCSVD<Matrix> core(sar, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = core.singularValues();
  Index q = 0;
  if (sigma.size() > 0 && sigma(0) > 0.0)
    while (q < sigma.size() && sigma(q) > cutoff * sigma(0)) ++q;

  RankKFactors out;
  out.k = k;
  if (q == 0) {
    out.left = Matrix::Zero(ar.rows(), k);
    out.right = Matrix::Zero(k, sa.cols());
    return out;
  }
  const Matrix basis = core.matrixV().leftCols(q);  // P
  const Matrix projected = ar * basis;              // A R P
  Eigen::BDCSVD<Matrix> trunc(projected, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index kk = std::min<Index>(k, trunc.singularValues().size());
  const Matrix left = trunc.matrixU().leftCols(kk) * trunc.singularValues().head(kk).asDiagonal();
  // P^T (SAR)^+ = Sigma_q^-1 U_q^T because P = V_q.
  const Matrix pinv_rows =
      sigma.head(q).cwiseInverse().asDiagonal() * core.matrixU().leftCols(q).transpose();
  const Matrix right = trunc.matrixV().leftCols(kk).transpose() * (pinv_rows * sa);
  out.left = pad_cols(left, k);
  out.right = pad_rows(right, k);
  return out;
}

/// ||(left right - target) G^T||_F^2 where target G^T = a_left (a_right G^T).
inline double probe_error(const RankKFactors& f, const Matrix& a_left, const Matrix& a_right,
                          const GaussianSketch& probe) {
  const Matrix g = probe.matrix().transpose();  // d x w
  const Matrix approx = f.left * (f.right * g);
  const Matrix exact = a_left * (a_right * g);
  return (approx - exact).squaredNorm();
}

/// Repeated sketch-and-solve of A = a_left * a_right, a_left n x w,
/// a_right w x d, keeping the draw with the smallest probe error.
inline RankKFactors solve_factored(const Matrix& a_left, const Matrix& a_right, Index k, Index rows_s,
                                   Index cols_r, std::uint64_t seed, const LraConfig& cfg,
                                   StageTimes times) {
  const Index n = a_left.rows();
  const Index d = a_right.cols();
  const GaussianSketch probe(std::max<Index>(1, cfg.probe_width), d, rng::hash(seed, kSeedProbe));

  RankKFactors best;
  best.surrogate_error = std::numeric_limits<double>::infinity();
  const int reps = std::max(1, cfg.repetitions);
  for (int rep = 0; rep < reps; ++rep) {
    const std::uint64_t rep_seed = rng::hash(seed, 100 + static_cast<std::uint64_t>(rep));

    auto start = Clock::now();
    const GaussianSketch s(rows_s, n, rng::hash(rep_seed, kSeedS));
    const GaussianSketch r(cols_r, d, rng::hash(rep_seed, kSeedR));
    const Matrix s_left = s.apply(a_left, Side::Left);     // S U''      rows_s x w
    const Matrix right_r = r.apply(a_right, Side::Right);  // V'' R      w x cols_r
    const Matrix sa = s_left * a_right;
    const Matrix ar = a_left * right_r;
    const Matrix sar = s_left * right_r;
    times.sketch += seconds_since(start);

    start = Clock::now();
    RankKFactors candidate = sketch_solve(ar, sa, sar, k, cfg.pinv_cutoff);
    times.solve += seconds_since(start);

    start = Clock::now();
    candidate.surrogate_error = probe_error(candidate, a_left, a_right, probe);
    candidate.repetition = rep;
    times.verify += seconds_since(start);

    if (candidate.surrogate_error < best.surrogate_error) best = std::move(candidate);
  }
  best.timings = times;
  return best;
}

inline RankKFactors exact_linearization(const TensoredFactor& left, const TensoredFactor& right,
                                        Index k, StageTimes times) {
  RankKFactors out;
  out.k = k;
  out.left = pad_cols(left.expanded(), k);
  out.right = pad_rows(right.expanded(), k);
  out.degenerate = true;
  out.timings = times;
  return out;
}

}  // namespace detail

/// Sketch-and-solve rank-k approximation of (UV)^{o p} through the explicit
/// Khatri-Rao factors, for any p >= 1. relative_lra is this function
/// restricted to even p; the reduction harness also uses it for odd p, where
/// it approximates (UV)^p rather than |UV|^p.
inline RankKFactors linearized_lra(const FactoredMatrix& fm, int p, Index k, double eps,
                                   std::uint64_t seed, const LraConfig& cfg = {}) {
  detail::validate_lra_args(p, k, eps, "linearized_lra");
  if (p > cfg.limits.max_implicit_degree)
    throw ResourceError("linearized_lra: degree " + std::to_string(p) + " above the cap of " +
                        std::to_string(cfg.limits.max_implicit_degree));
  tensored_width(fm.inner(), p, fm.rows() + fm.cols(), cfg.limits);

  StageTimes times;
  auto start = detail::Clock::now();
  const TensoredFactor left = expand(fm.u(), p, Orientation::RowsTensored, cfg.limits);
  const TensoredFactor right = expand(fm.v(), p, Orientation::ColsTensored, cfg.limits);
  times.expand = detail::seconds_since(start);

  const Index width = left.width();
  if (k >= width) return detail::exact_linearization(left, right, k, times);

  const Index rows_s = cfg.rows_s.value_or(sketch_dims::left_rows(k, eps));
  const Index cols_r =
      cfg.cols_r.value_or(sketch_dims::right_cols(k, eps, static_cast<double>(width), cfg.right_width));
  return detail::solve_factored(left.expanded(), right.expanded(), k, rows_s, cols_r, seed, cfg, times);
}

/// (1 + eps)-relative-error rank-k approximation of (UV)^{o p}, p even.
///
/// Cost O((n + d) r^p (mS + mR)) plus small dense SVDs. For k >= r^p the
/// exact rank-r^p factorization is returned zero-padded to width k and
/// flagged degenerate.
inline RankKFactors relative_lra(const FactoredMatrix& fm, int p, Index k, double eps,
                                 std::uint64_t seed, const LraConfig& cfg = {}) {
  detail::validate_lra_args(p, k, eps, "relative_lra");
  if (p % 2 != 0)
    throw UnsupportedTransform("relative_lra: odd degree " + std::to_string(p) +
                               " is not supported; use additive_lra or the dense oracle");
  return linearized_lra(fm, p, k, eps, seed, cfg);
}

/// Additive-error rank-k approximation of (UV)^{o p}, p even, via
/// TensorSketch. Never forms an r^p-wide object unless k >= r^p, in which
/// case it returns the exact linearization like relative_lra.
///
/// Repetitions redraw S and R; the TensorSketch T is drawn once so that the
/// probe compares every repetition against the same target U'''V'''.
inline RankKFactors additive_lra(const FactoredMatrix& fm, int p, Index k, double eps,
                                 std::uint64_t seed, const LraConfig& cfg = {}) {
  detail::validate_lra_args(p, k, eps, "additive_lra");
  if (p % 2 != 0)
    throw UnsupportedTransform("additive_lra: odd degree " + std::to_string(p) + " is not supported");

  const std::uint64_t width = detail::checked_pow(static_cast<std::uint64_t>(fm.inner()), p);
  if (width != 0 && static_cast<std::uint64_t>(k) >= width) {
    StageTimes times;
    const auto start = detail::Clock::now();
    const TensoredFactor left = expand(fm.u(), p, Orientation::RowsTensored, cfg.limits);
    const TensoredFactor right = expand(fm.v(), p, Orientation::ColsTensored, cfg.limits);
    times.expand = detail::seconds_since(start);
    return detail::exact_linearization(left, right, k, times);
  }

  StageTimes times;
  const Index tensor_m = cfg.tensor_m.value_or(sketch_dims::tensor_rows(p, eps));
  auto start = detail::Clock::now();
  const TensorSketchOp ts(tensor_m, p, fm.inner(), rng::hash(seed, detail::kSeedT));
  const Matrix u3 = ts.apply_rows(fm.u());  // n x mT
  const Matrix v3 = ts.apply_cols(fm.v());  // mT x d
  times.expand = detail::seconds_since(start);

  const Index rows_s = cfg.rows_s.value_or(sketch_dims::left_rows(k, eps));
  const Index cols_r = cfg.cols_r.value_or(
      sketch_dims::right_cols(k, eps, static_cast<double>(tensor_m), cfg.right_width));
  return detail::solve_factored(u3, v3, k, rows_s, cols_r, seed, cfg, times);
}

/// (sum_i ||U_i||^(2p)) (sum_j ||V_j||^(2p)), rows of U and columns of V.
inline double compute_L2(const FactoredMatrix& fm, int p) {
  if (p < 1) throw ContractViolation("compute_L2: degree must be positive");
  const Vector row_sq = fm.u().rowwise().squaredNorm();
  const Vector col_sq = fm.v().colwise().squaredNorm().transpose();
  double left = 0.0;
  double right = 0.0;
  for (Index i = 0; i < row_sq.size(); ++i) left += ScalarTransform::ipow(row_sq(i), p);
  for (Index j = 0; j < col_sq.size(); ++j) right += ScalarTransform::ipow(col_sq(j), p);
  return left * right;
}

/// Orthonormal basis of colspan(rk.left) by column-pivoted QR; drops
/// directions whose pivot falls below `threshold` times the largest.
inline ProjectionOutput projection_from_factors(const RankKFactors& rk, double threshold = 1e-10) {
  ProjectionOutput out;
  out.requested = rk.left.cols();
  const Index n = rk.left.rows();
  if (rk.left.cols() == 0 || rk.left.isZero(0.0)) {
    out.w = Matrix(n, 0);
    out.rank_deficient = out.requested > 0;
    return out;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(rk.left);
  qr.setThreshold(threshold);
  const Index rank = qr.rank();
  out.w = qr.householderQ() * Matrix::Identity(n, rank);
  out.rank_deficient = rank < out.requested;
  return out;
}

}  // namespace etlra

#endif  // ETLRA_LRA_HPP
