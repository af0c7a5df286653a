#ifndef ETLRA_REDUCTION_HPP
#define ETLRA_REDUCTION_HPP

#include "etlra/common.hpp"
#include "etlra/leverage.hpp"
#include "etlra/lra.hpp"
#include "etlra/oracle.hpp"
#include "etlra/random.hpp"
#include "etlra/tensoring.hpp"
#include "etlra/transform.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Orthogonal-vectors to low-rank-approximation reduction harness.
//
// U = [A | c], V^T = [B | c] with c a random sign column, so
// <U_i, V_j> = <a_i, b_j> + c_i c_j. Without orthogonal pairs every entry is
// >= 0 and |UV|^p = U''V'' exactly. An orthogonal pair with c_i c_j = -1
// flips one entry from (-1)^p = -1 to 1, a flat sparse difference that the
// harness finds through column residuals or leverage scores.

namespace etlra {

/// Two sets of binary vectors: rows of `a` (n x s) and of `b` (d x s).
struct OvpInstance {
  Matrix a;
  Matrix b;
  std::vector<std::pair<Index, Index>> planted;

  Index s() const { return a.cols(); }
  Index n() const { return a.rows(); }
  Index d() const { return b.rows(); }
  bool same_sets() const { return a.rows() == b.rows() && a == b; }

  /// Throws ContractViolation unless entries are binary, dims agree and
  /// every planted pair is orthogonal.
  void validate() const {
    if (a.cols() < 1 || a.cols() != b.cols() || a.rows() < 1 || b.rows() < 1)
      throw ContractViolation("OvpInstance: need n, d >= 1 and a common vector length s >= 1");
    auto binary = [](const Matrix& m) { return ((m.array() == 0.0) || (m.array() == 1.0)).all(); };
    if (!binary(a) || !binary(b)) throw ContractViolation("OvpInstance: entries must be 0 or 1");
    for (const auto& [i, j] : planted) {
      if (i < 0 || i >= n() || j < 0 || j >= d())
        throw ContractViolation("OvpInstance: planted pair index out of range");
      if (a.row(i).dot(b.row(j)) != 0.0)
        throw ContractViolation("OvpInstance: planted pair (" + std::to_string(i) + ", " +
                                std::to_string(j) + ") is not orthogonal");
    }
  }
};

/// All (i, j), i in `rows`, with <a_i, b_j> = 0. O(|rows| d s).
inline std::vector<std::pair<Index, Index>> orthogonal_pairs(const OvpInstance& inst,
                                                             const std::vector<Index>& rows) {
  std::vector<std::pair<Index, Index>> out;
  for (Index i : rows)
    for (Index j = 0; j < inst.d(); ++j)
      if (inst.a.row(i).dot(inst.b.row(j)) == 0.0) out.emplace_back(i, j);
  return out;
}

inline std::vector<std::pair<Index, Index>> orthogonal_pairs(const OvpInstance& inst) {
  std::vector<Index> all(static_cast<std::size_t>(inst.n()));
  for (Index i = 0; i < inst.n(); ++i) all[static_cast<std::size_t>(i)] = i;
  return orthogonal_pairs(inst, all);
}

enum class Decision { No, Yes };
enum class DecisionPath { None, ResidualExceeded, PairFound };

inline const char* to_string(Decision d) { return d == Decision::Yes ? "YES" : "NO"; }
inline const char* to_string(DecisionPath p) {
  switch (p) {
    case DecisionPath::ResidualExceeded:
      return "residual-exceeded";
    case DecisionPath::PairFound:
      return "pair-found";
    case DecisionPath::None:
      break;
  }
  return "none";
}

struct ReductionTrace {
  Vector sign_column;
  Vector residuals;
  std::vector<Index> candidates;
  Decision decision = Decision::No;
  DecisionPath path = DecisionPath::None;
  std::optional<std::pair<Index, Index>> found_pair;
  Vector leverage;
  double tau = 0.0;
  Index k = 0;
  Index basis_width = 0;
  double max_residual = 0.0;
  bool bailed_out = false;
};

/// Returns an orthonormal n x q (q <= k) basis W approximating the top-k
/// column space of f(UV).
using LraBackend = std::function<ProjectionOutput(const FactoredMatrix&, const ScalarTransform&,
                                                  Index k, std::uint64_t seed)>;

struct ReductionConfig {
  double alpha = 0.25;
  double residual_factor = 1.01;
  /// Stand-in for the bound on the number of orthogonal pairs.
  Index planted_bound = 8;
  /// Leverage threshold; default 1 / (100 log2(n) max(1, planted_bound)).
  std::optional<double> tau;
  /// Target rank; default (s+1)^p + planted_bound.
  std::optional<Index> k;
  /// Bail out of the brute-force stage when |S| exceeds this. Unset: never.
  std::optional<Index> max_candidates;
  LeverageConfig leverage;
  Limits limits = Limits::from_env();
};

inline double default_tau(Index n, Index planted_bound) {
  const double log_n = std::max(1.0, std::log2(static_cast<double>(n)));
  return 1.0 / (100.0 * log_n * static_cast<double>(std::max<Index>(1, planted_bound)));
}

/// U = [A | c] (n x (s+1)) and V = [B | c']^T. c' = c when n = d (so
/// U = V^T when A = B); otherwise c' is an independent sign vector.
inline FactoredMatrix build_factors(const OvpInstance& inst, std::uint64_t seed) {
  inst.validate();
  const Index n = inst.n();
  const Index d = inst.d();
  const Index s = inst.s();
  const Vector c = rng::sign_vector(n, rng::hash(seed, 1));
  const Vector c_cols = (n == d) ? c : rng::sign_vector(d, rng::hash(seed, 2));

  Matrix u(n, s + 1);
  u.leftCols(s) = inst.a;
  u.col(s) = c;
  Matrix vt(d, s + 1);
  vt.leftCols(s) = inst.b;
  vt.col(s) = c_cols;
  return FactoredMatrix(std::move(u), vt.transpose());
}

/// r_j^2 = ||U''V'' e_j||^2 - ||W^T U''V'' e_j||^2, clamped at 0. Uses the
/// r^p x r^p Gram matrix of U'' and W^T U'', never the n x d product.
inline Vector column_residuals(const TensoredFactor& left, const TensoredFactor& right,
                               const ProjectionOutput& proj, double orthonormal_tol = 1e-8) {
  const Matrix& w = proj.w;
  detail::require(w.rows() == left.count(), "column_residuals: W must have n rows");
  detail::require(left.width() == right.width(), "column_residuals: inner dimension mismatch");
  if (w.cols() > 0) {
    const double defect =
        (w.transpose() * w - Matrix::Identity(w.cols(), w.cols())).cwiseAbs().maxCoeff();
    if (defect > orthonormal_tol)
      throw ContractViolation("column_residuals: W is not orthonormal (defect " +
                              std::to_string(defect) + ")");
  }
  const Matrix& ut = left.expanded();
  const Matrix& vt = right.expanded();
  const Matrix gram = ut.transpose() * ut;
  const Vector full = (vt.array() * (gram * vt).array()).colwise().sum().transpose();
  Vector out = full;
  if (w.cols() > 0) {
    const Matrix projected = (w.transpose() * ut) * vt;
    out -= projected.colwise().squaredNorm().transpose();
  }
  return out.cwiseMax(0.0);
}

/// Exact SVD truncation of the materialized f(UV).
inline LraBackend oracle_backend(Limits limits = Limits::from_env()) {
  return [limits](const FactoredMatrix& fm, const ScalarTransform& t, Index k, std::uint64_t) {
    const oracle::DenseMatrix m = oracle::materialize(fm, t, limits);
    return projection_from_factors(
        oracle::truncate(m, std::min<Index>(k, std::min(m.rows(), m.cols())), 1e-10));
  };
}

/// The sketching pipeline of relative_lra run on the degree-p
/// linearization (UV)^p. It meets the additive budget for |UV|^p only when
/// the two agree, i.e. on instances without orthogonal pairs.
inline LraBackend sketch_backend(double eps = 0.5, LraConfig cfg = {}) {
  return [eps, cfg](const FactoredMatrix& fm, const ScalarTransform& t, Index k, std::uint64_t seed) {
    return projection_from_factors(linearized_lra(fm, t.degree(), k, eps, seed, cfg));
  };
}

/// Runs the reduction for f = |x|^p, p odd, and returns the full trace.
inline ReductionTrace run_reduction(const OvpInstance& inst, int p, const LraBackend& backend,
                                    std::uint64_t seed, const ReductionConfig& cfg = {}) {
  if (p < 1 || p % 2 == 0)
    throw UnsupportedTransform("run_reduction: the harness covers odd p only, got " + std::to_string(p));
  if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0))
    throw ContractViolation("run_reduction: alpha must lie in (0, 2)");

  const FactoredMatrix fm = build_factors(inst, seed);
  const ScalarTransform t = ScalarTransform::abs_power(p);

  ReductionTrace trace;
  trace.sign_column = fm.u().col(inst.s());
  const std::uint64_t width = detail::checked_pow(static_cast<std::uint64_t>(inst.s() + 1), p);
  trace.k = cfg.k.value_or(static_cast<Index>(width) + cfg.planted_bound);

  const ProjectionOutput basis = backend(fm, t, trace.k, rng::hash(seed, 3));
  trace.basis_width = basis.w.cols();

  const TensoredFactor left = expand(fm.u(), p, Orientation::RowsTensored, cfg.limits);
  const TensoredFactor right = expand(fm.v(), p, Orientation::ColsTensored, cfg.limits);
  trace.residuals = column_residuals(left, right, basis);
  trace.max_residual = trace.residuals.size() > 0 ? trace.residuals.maxCoeff() : 0.0;
  if (trace.max_residual > cfg.residual_factor * cfg.alpha) {
    trace.decision = Decision::Yes;
    trace.path = DecisionPath::ResidualExceeded;
    return trace;
  }

  const LeverageScores scores = sketched_leverage(basis.w, rng::hash(seed, 4), cfg.leverage);
  trace.leverage = scores.scores;
  trace.tau = cfg.tau.value_or(default_tau(inst.n(), cfg.planted_bound));
  trace.candidates = threshold_support(scores, trace.tau);
  if (cfg.max_candidates && static_cast<Index>(trace.candidates.size()) > *cfg.max_candidates) {
    trace.bailed_out = true;
    return trace;
  }

  const auto pairs = orthogonal_pairs(inst, trace.candidates);
  if (!pairs.empty()) {
    trace.decision = Decision::Yes;
    trace.path = DecisionPath::PairFound;
    trace.found_pair = pairs.front();
  }
  return trace;
}

}  // namespace etlra

#endif  // ETLRA_REDUCTION_HPP
