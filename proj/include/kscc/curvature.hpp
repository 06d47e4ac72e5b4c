#pragma once

#include "kscc/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace kscc {

/// Ordered tuple of ell+1 distinct point indices; the fixed part of the
/// (ell+2)-point subsets whose curvature fills one affinity column.
struct TupleIndex {
  std::vector<Index> indices;

  TupleIndex() = default;
  explicit TupleIndex(std::vector<Index> idx) : indices(std::move(idx)) {}

  Index size() const { return static_cast<Index>(indices.size()); }

  void validate(Index n) const {
    for (std::size_t a = 0; a < indices.size(); ++a) {
      require(indices[a] >= 0 && indices[a] < n,
              "tuple index out of range");
      for (std::size_t b = a + 1; b < indices.size(); ++b)
        require(indices[a] != indices[b], "tuple indices must be distinct");
    }
  }
};

/// Squared polar curvatures of {i} u J for every point i outside the tuple J.
/// Member positions hold an excluded sentinel (NaN).
struct CurvatureColumn {
  TupleIndex tuple;
  Vector values;

  static constexpr double excluded_value() {
    return std::numeric_limits<double>::quiet_NaN();
  }
  static bool is_excluded(double v) { return std::isnan(v); }
  bool excluded(Index i) const { return is_excluded(values[i]); }
};

namespace detail {

// Threshold below which a squared feature distance counts as a coinciding
// pair, triggering the zero-curvature rule.
inline double duplicate_eps(const Matrix& k) {
  return 1e-12 * k.diagonal().maxCoeff();
}

// Magnitude up to which a negative determinant is attributed to round-off
// and clamped; anything more negative means the Gram matrix is not PSD.
inline double det_clamp_tol(const Matrix& k, Index m) {
  const double entry_bound = k.diagonal().maxCoeff() + 1.0;
  return 1e-9 * std::pow(std::sqrt(static_cast<double>(m)) * entry_bound,
                         static_cast<double>(m));
}

inline double checked_det(double det, double tol) {
  if (det < 0.0) {
    if (det < -tol)
      throw NumericalError(
          "strongly negative Gram determinant; kernel matrix is not PSD");
    return 0.0;
  }
  return det;
}

inline double sq_dist(const Matrix& k, Index i, Index j) {
  return k(i, i) + k(j, j) - 2.0 * k(i, j);
}

// adj(A) = det(A) * A^-1 when the determinant carries enough magnitude;
// explicit cofactors otherwise.
inline Matrix adjugate(const Matrix& a) {
  const Index m = a.rows();
  if (m == 1) {
    Matrix r(1, 1);
    r(0, 0) = 1.0;
    return r;
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  const double det = lu.determinant();
  if (std::abs(det) >= 1e-300) return det * lu.inverse();
  Matrix adj(m, m);
  Matrix minor(m - 1, m - 1);
  for (Index r = 0; r < m; ++r) {
    for (Index c = 0; c < m; ++c) {
      for (Index i = 0, mi = 0; i < m; ++i) {
        if (i == r) continue;
        for (Index j = 0, mj = 0; j < m; ++j) {
          if (j == c) continue;
          minor(mi, mj) = a(i, j);
          ++mj;
        }
        ++mi;
      }
      const double cof =
          ((r + c) % 2 == 0 ? 1.0 : -1.0) * minor.determinant();
      adj(c, r) = cof;  // adjugate is the transposed cofactor matrix
    }
  }
  return adj;
}

}  // namespace detail

/// Squared polar curvature of the feature vectors of an (ell+2)-point subset,
/// computed from the Gram matrix alone:
///   c_p^2 = (1/m) * max_{i,j} d_ij * sum_i det(K_II + 1) / prod_{j != i} d_ij
/// with m = |I|, d_ij = K_ii + K_jj - 2 K_ij and "+1" adding 1 to every
/// entry. Any coinciding pair of feature points yields 0.
inline double polar_curvature_sq(const Matrix& k,
                                 std::span<const Index> subset) {
  const Index m = static_cast<Index>(subset.size());
  require(m >= 3, "polar_curvature_sq: subset must hold at least 3 points");
  TupleIndex(std::vector<Index>(subset.begin(), subset.end()))
      .validate(k.rows());

  const double eps_dup = detail::duplicate_eps(k);
  Matrix d(m, m);
  double max_d = 0.0;
  for (Index a = 0; a < m; ++a) {
    d(a, a) = 0.0;
    for (Index b = a + 1; b < m; ++b) {
      const double v = detail::sq_dist(k, subset[a], subset[b]);
      if (v <= eps_dup) return 0.0;
      d(a, b) = v;
      d(b, a) = v;
      max_d = std::max(max_d, v);
    }
  }

  Matrix block(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b)
      block(a, b) = k(subset[a], subset[b]) + 1.0;
  const double det = detail::checked_det(
      Eigen::PartialPivLU<Matrix>(block).determinant(),
      detail::det_clamp_tol(k, m));

  double inv_prod_sum = 0.0;
  for (Index a = 0; a < m; ++a) {
    double prod = 1.0;
    for (Index b = 0; b < m; ++b)
      if (b != a) prod *= d(a, b);
    inv_prod_sum += 1.0 / prod;
  }
  const double c2 = max_d * det * inv_prod_sum / static_cast<double>(m);
  return c2 > 0.0 ? c2 : 0.0;
}

/// Reference column: one independent determinant per point. Kept as the slow
/// baseline the fast path is checked (and benchmarked) against.
inline CurvatureColumn curvature_column_naive(const Matrix& k,
                                              const TupleIndex& j) {
  const Index n = k.rows();
  j.validate(n);
  require(n > j.size(), "curvature_column: no points outside the tuple");
  CurvatureColumn col;
  col.tuple = j;
  col.values = Vector::Constant(n, CurvatureColumn::excluded_value());
  std::vector<Index> subset(j.indices.size() + 1);
  std::copy(j.indices.begin(), j.indices.end(), subset.begin() + 1);
  std::vector<char> member(n, 0);
  for (Index idx : j.indices) member[idx] = 1;
  for (Index i = 0; i < n; ++i) {
    if (member[i]) continue;
    subset[0] = i;
    col.values[i] = polar_curvature_sq(k, subset);
  }
  return col;
}

/// Fast column: precomputes adj(K_JJ + 1) once, then obtains every
/// determinant det(K_II + 1), I = {i} u J, from the bordered expansion
///   det = (K_ii + 1) det(A) - b' adj(A) b,   b = K_{J,i} + 1,
/// at O((ell+1)^2) per point.
inline CurvatureColumn curvature_column(const Matrix& k, const TupleIndex& j) {
  const Index n = k.rows();
  const Index m1 = j.size();  // ell + 1
  const Index m = m1 + 1;     // subset size ell + 2
  j.validate(n);
  require(n > m1, "curvature_column: no points outside the tuple");

  CurvatureColumn col;
  col.tuple = j;
  col.values = Vector::Constant(n, CurvatureColumn::excluded_value());

  const double eps_dup = detail::duplicate_eps(k);
  const double det_tol = detail::det_clamp_tol(k, m);

  // Pairwise squared distances inside J; a coinciding pair zeroes the column.
  Matrix dj(m1, m1);
  bool degenerate_tuple = false;
  double max_dj = 0.0;
  for (Index a = 0; a < m1; ++a) {
    dj(a, a) = 0.0;
    for (Index b = a + 1; b < m1; ++b) {
      const double v = detail::sq_dist(k, j.indices[a], j.indices[b]);
      dj(a, b) = v;
      dj(b, a) = v;
      if (v <= eps_dup) degenerate_tuple = true;
      max_dj = std::max(max_dj, v);
    }
  }

  std::vector<char> member(n, 0);
  for (Index idx : j.indices) member[idx] = 1;

  if (degenerate_tuple) {
    for (Index i = 0; i < n; ++i)
      if (!member[i]) col.values[i] = 0.0;
    return col;
  }

  Matrix a(m1, m1);
  for (Index r = 0; r < m1; ++r)
    for (Index c = 0; c < m1; ++c)
      a(r, c) = k(j.indices[r], j.indices[c]) + 1.0;
  const double det_a = Eigen::PartialPivLU<Matrix>(a).determinant();
  const Matrix adj_a = detail::adjugate(a);

  // prod over the other tuple members, one factor short of each denominator
  Vector tuple_prod(m1);
  for (Index t = 0; t < m1; ++t) {
    double prod = 1.0;
    for (Index s = 0; s < m1; ++s)
      if (s != t) prod *= dj(t, s);
    tuple_prod[t] = prod;
  }

  Vector b(m1), di(m1), adj_b(m1);
  for (Index i = 0; i < n; ++i) {
    if (member[i]) continue;
    bool coincide = false;
    double max_d = max_dj;
    for (Index t = 0; t < m1; ++t) {
      const double v = detail::sq_dist(k, i, j.indices[t]);
      if (v <= eps_dup) {
        coincide = true;
        break;
      }
      di[t] = v;
      max_d = std::max(max_d, v);
    }
    if (coincide) {
      col.values[i] = 0.0;
      continue;
    }
    for (Index t = 0; t < m1; ++t) b[t] = k(j.indices[t], i) + 1.0;
    adj_b.noalias() = adj_a * b;
    const double det = detail::checked_det(
        (k(i, i) + 1.0) * det_a - b.dot(adj_b), det_tol);
    double inv_prod_sum = 1.0 / di.prod();
    for (Index t = 0; t < m1; ++t)
      inv_prod_sum += 1.0 / (di[t] * tuple_prod[t]);
    const double c2 = max_d * det * inv_prod_sum / static_cast<double>(m);
    col.values[i] = c2 > 0.0 ? c2 : 0.0;
  }
  return col;
}

}  // namespace kscc
