#pragma once

#include "kscc/common.hpp"
#include "kscc/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace kscc {

/// Floor for sigma^2 when every sampled curvature is zero (all data on one
/// flat); any positive value then gives the correct all-ones affinities.
inline constexpr double kSigmaSqFloor = 1e-12;

/// All non-excluded squared curvatures of the sampled columns, sorted
/// increasingly; the lookup table of the sigma sweep.
struct SortedCurvatures {
  std::vector<double> values;
};

inline SortedCurvatures collect_sorted_curvatures(
    std::span<const CurvatureColumn> columns) {
  SortedCurvatures out;
  for (const auto& col : columns) {
    for (Index i = 0; i < col.values.size(); ++i) {
      const double v = col.values[i];
      if (!CurvatureColumn::is_excluded(v)) out.values.push_back(v);
    }
  }
  std::sort(out.values.begin(), out.values.end());
  return out;
}

/// Sweep rule: sigma^2 is the sorted curvature at 1-based position
/// round(N*c/K^p), clamped into range. A zero pick falls through to the
/// smallest positive entry, then to the floor.
inline double sigma_sq_from_sweep(const SortedCurvatures& sorted, Index n,
                                  Index c, Index k, int p) {
  require(!sorted.values.empty(), "sigma sweep: empty curvature vector");
  require(p >= 1, "sigma sweep: p must be >= 1");
  const double raw = static_cast<double>(n) * static_cast<double>(c) /
                     std::pow(static_cast<double>(k), p);
  const auto len = static_cast<std::ptrdiff_t>(sorted.values.size());
  auto idx = static_cast<std::ptrdiff_t>(std::floor(raw + 0.5));  // half-up
  idx = std::clamp<std::ptrdiff_t>(idx, 1, len);
  double value = sorted.values[static_cast<std::size_t>(idx - 1)];
  if (value <= 0.0) {
    auto it = std::upper_bound(sorted.values.begin(), sorted.values.end(), 0.0);
    value = (it != sorted.values.end()) ? *it : kSigmaSqFloor;
  }
  return value;
}

/// Gaussian affinity of a squared curvature.
inline double affinity(double c_sq, double sigma_sq) {
  require(sigma_sq > 0.0, "affinity: sigma_sq must be positive");
  require(c_sq >= 0.0, "affinity: curvature must be nonnegative");
  return std::exp(-c_sq / (2.0 * sigma_sq));
}

/// N x c matrix of affinity columns. Tuples containing the evaluated point
/// are not valid (ell+2)-subsets, so excluded entries become affinity 0.
inline Matrix affinity_matrix(std::span<const CurvatureColumn> columns,
                              double sigma_sq) {
  require(!columns.empty(), "affinity_matrix: no columns");
  require(sigma_sq > 0.0, "affinity_matrix: sigma_sq must be positive");
  const Index n = columns.front().values.size();
  Matrix a(n, static_cast<Index>(columns.size()));
  const double inv = -1.0 / (2.0 * sigma_sq);
  for (std::size_t r = 0; r < columns.size(); ++r) {
    require(columns[r].values.size() == n,
            "affinity_matrix: column length mismatch");
    for (Index i = 0; i < n; ++i) {
      const double v = columns[r].values[i];
      a(i, static_cast<Index>(r)) =
          CurvatureColumn::is_excluded(v) ? 0.0 : std::exp(v * inv);
    }
  }
  return a;
}

/// W = A A', accumulated over columns in fixed order, diagonal zeroed.
inline Matrix estimate_weights(const Matrix& affinities) {
  require(affinities.cols() >= 1, "estimate_weights: no columns");
  Matrix w(affinities.rows(), affinities.rows());
  w.noalias() = affinities * affinities.transpose();
  w.diagonal().setZero();
  return w;
}

/// Column-list form of the estimator; validates equal lengths.
inline Matrix estimate_weights(const std::vector<Vector>& columns, Index n) {
  require(!columns.empty(), "estimate_weights: no columns");
  Matrix a(n, static_cast<Index>(columns.size()));
  for (std::size_t r = 0; r < columns.size(); ++r) {
    require(columns[r].size() == n, "estimate_weights: column length mismatch");
    a.col(static_cast<Index>(r)) = columns[r];
  }
  return estimate_weights(a);
}

}  // namespace kscc
