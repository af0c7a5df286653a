#ifndef ETLRA_INSTANCES_HPP
#define ETLRA_INSTANCES_HPP

#include "etlra/common.hpp"
#include "etlra/random.hpp"
#include "etlra/reduction.hpp"
#include "etlra/transform.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

// Seeded instance generators.

namespace etlra::instances {

/// U (n x r), V (r x d) with i.i.d. uniform [-1, 1] entries.
inline FactoredMatrix random_factors(Index n, Index d, Index r, std::uint64_t seed) {
  return FactoredMatrix(rng::uniform_matrix(n, r, rng::hash(seed, 1)),
                        rng::uniform_matrix(r, d, rng::hash(seed, 2)));
}

/// Random factors with every row of U and every column of V scaled to unit
/// norm.
inline FactoredMatrix unit_norm_factors(Index n, Index d, Index r, std::uint64_t seed) {
  Matrix u = rng::uniform_matrix(n, r, rng::hash(seed, 1));
  Matrix v = rng::uniform_matrix(r, d, rng::hash(seed, 2));
  for (Index i = 0; i < n; ++i) {
    if (u.row(i).norm() == 0.0) u(i, 0) = 1.0;
    u.row(i).normalize();
  }
  for (Index j = 0; j < d; ++j) {
    if (v.col(j).norm() == 0.0) v(0, j) = 1.0;
    v.col(j).normalize();
  }
  return FactoredMatrix(std::move(u), std::move(v));
}

struct PlantedOvpParams {
  Index n = 64;
  Index d = 64;
  Index s = 12;
  Index pairs = 1;
  double density = 0.5;
  int max_attempts = 200;
};

/// OVP instance with exactly `pairs` orthogonal pairs, all at distinct rows,
/// distinct columns and i != j. Non-planted vectors are rejection-sampled so
/// every other pair has inner product >= 1. Throws ContractViolation when
/// the parameters do not admit such an instance within the attempt budget.
inline OvpInstance planted_ovp(const PlantedOvpParams& params, std::uint64_t seed) {
  const Index n = params.n;
  const Index d = params.d;
  const Index s = params.s;
  const Index q = params.pairs;
  if (n < 1 || d < 1 || s < 2 || q < 0)
    throw ContractViolation("planted_ovp: need n, d >= 1, s >= 2 and pairs >= 0");
  if (q > std::min(n, d))
    throw ContractViolation("planted_ovp: too many planted pairs for n = " + std::to_string(n) +
                            ", d = " + std::to_string(d));

  rng::Stream stream(seed);
  auto shuffle = [&](std::vector<Index>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[stream.below(i)]);
  };
  auto random_bits = [&](Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, double density) {
    do {
      for (Index c = 0; c < s; ++c) row(c) = stream.coin(density) ? 1.0 : 0.0;
    } while (row.sum() == 0.0);
  };

  const int vector_budget = 20000;
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    OvpInstance inst;
    inst.a = Matrix::Zero(n, s);
    inst.b = Matrix::Zero(d, s);

    // Distinct rows and columns, i != j.
    std::vector<Index> rows(static_cast<std::size_t>(n));
    std::vector<Index> cols(static_cast<std::size_t>(d));
    for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
    for (Index j = 0; j < d; ++j) cols[static_cast<std::size_t>(j)] = j;
    shuffle(rows);
    shuffle(cols);
    std::vector<Index> partner_of_col(static_cast<std::size_t>(d), -1);
    bool placed = true;
    std::set<Index> used_cols;
    for (Index t = 0; t < q; ++t) {
      const Index i = rows[static_cast<std::size_t>(t)];
      Index j = -1;
      for (Index c : cols)
        if (c != i && !used_cols.count(c)) {
          j = c;
          break;
        }
      if (j < 0) {
        placed = false;
        break;
      }
      used_cols.insert(j);
      partner_of_col[static_cast<std::size_t>(j)] = i;
      inst.planted.emplace_back(i, j);
    }
    if (!placed) continue;
    std::sort(inst.planted.begin(), inst.planted.end());

    for (Index i = 0; i < n; ++i) random_bits(inst.a.row(i), params.density);

    bool ok = true;
    for (Index j = 0; j < d && ok; ++j) {
      const Index partner = partner_of_col[static_cast<std::size_t>(j)];
      bool found = false;
      for (int tries = 0; tries < vector_budget && !found; ++tries) {
        Eigen::RowVectorXd b(s);
        if (partner >= 0) {
          // Support restricted to the zeros of the partner row.
          b.setZero();
          for (Index c = 0; c < s; ++c)
            if (inst.a(partner, c) == 0.0 && stream.coin(params.density)) b(c) = 1.0;
          if (b.sum() == 0.0) continue;
        } else {
          random_bits(b, params.density);
        }
        bool clean = true;
        for (Index i = 0; i < n && clean; ++i)
          if (i != partner && inst.a.row(i).dot(b) == 0.0) clean = false;
        if (clean) {
          inst.b.row(j) = b;
          found = true;
        }
      }
      ok = found;
    }
    if (ok) return inst;
  }
  throw ContractViolation("planted_ovp: could not realize " + std::to_string(q) +
                          " orthogonal pairs with s = " + std::to_string(s) +
                          "; increase s or lower n, d");
}

}  // namespace etlra::instances

#endif  // ETLRA_INSTANCES_HPP
