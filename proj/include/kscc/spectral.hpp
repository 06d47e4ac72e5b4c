#pragma once

#include "kscc/common.hpp"
#include "kscc/parallel.hpp"
#include "kscc/rng.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace kscc {

/// Assignment of N points to k clusters. Empty clusters are permitted;
/// empty_clusters() surfaces them for diagnostics.
struct Clustering {
  std::vector<int> labels;
  int k = 0;

  Index size() const { return static_cast<Index>(labels.size()); }

  std::vector<Index> cluster_sizes() const {
    std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    return sizes;
  }

  std::vector<int> empty_clusters() const {
    std::vector<int> empty;
    const auto sizes = cluster_sizes();
    for (int c = 0; c < k; ++c)
      if (sizes[static_cast<std::size_t>(c)] == 0) empty.push_back(c);
    return empty;
  }

  void validate() const {
    for (int l : labels)
      require(l >= 0 && l < k, "cluster label out of range");
  }
};

struct KMeansResult {
  Clustering clustering;
  double wcss = std::numeric_limits<double>::infinity();
};

namespace detail {

inline KMeansResult kmeans_single(const Matrix& rows, int k, Rng& rng,
                                  int max_iters = 100) {
  const Index n = rows.rows();
  const Index dim = rows.cols();
  Matrix centers(k, dim);

  // k-means++ seeding; when every remaining distance is zero (duplicate
  // rows) the next center is drawn uniformly.
  Vector dist2 = Vector::Constant(n, std::numeric_limits<double>::infinity());
  {
    const Index first = static_cast<Index>(rng.uniform_index(n));
    centers.row(0) = rows.row(first);
    for (Index i = 0; i < n; ++i)
      dist2[i] = (rows.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double total = dist2.sum();
      Index pick;
      if (total > 0.0) {
        const double u = rng.uniform() * total;
        double acc = 0.0;
        pick = n - 1;
        for (Index i = 0; i < n; ++i) {
          acc += dist2[i];
          if (u < acc) {
            pick = i;
            break;
          }
        }
      } else {
        pick = static_cast<Index>(rng.uniform_index(n));
      }
      centers.row(c) = rows.row(pick);
      for (Index i = 0; i < n; ++i)
        dist2[i] =
            std::min(dist2[i], (rows.row(i) - centers.row(c)).squaredNorm());
    }
  }

  std::vector<int> labels(n, -1);
  std::vector<int> prev(n, -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (rows.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (rows.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      labels[i] = best;
    }
    if (labels == prev) break;
    prev = labels;
    Matrix sums = Matrix::Zero(k, dim);
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(labels[i]) += rows.row(i);
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        centers.row(c) =
            sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    // empty cluster keeps its previous center
  }

  KMeansResult result;
  result.clustering.labels = std::move(labels);
  result.clustering.k = k;
  double wcss = 0.0;
  for (Index i = 0; i < n; ++i)
    wcss += (rows.row(i) - centers.row(result.clustering.labels[i]))
                .squaredNorm();
  result.wcss = wcss;
  return result;
}

}  // namespace detail

/// Best of `restarts` seeded k-means++ runs; the winner is the
/// lexicographically smallest (wcss, restart index), so the result does not
/// depend on scheduling.
inline KMeansResult kmeans_detailed(const Matrix& rows, int k, int restarts,
                                    std::uint64_t seed, int threads = 1) {
  require(k >= 1, "kmeans: k must be >= 1");
  require(rows.rows() >= k, "kmeans: fewer points than clusters");
  require(restarts >= 1, "kmeans: restarts must be >= 1");
  std::vector<KMeansResult> results(static_cast<std::size_t>(restarts));
  parallel_for(static_cast<std::size_t>(restarts), threads,
               [&](std::size_t r) {
                 Rng rng(mix_seed(seed, 0x6b6d6561, r));
                 results[r] = detail::kmeans_single(rows, k, rng);
               });
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].wcss < results[best].wcss) best = r;
  return results[best];
}

inline Clustering kmeans(const Matrix& rows, int k, int restarts,
                         std::uint64_t seed, int threads = 1) {
  return kmeans_detailed(rows, k, restarts, seed, threads).clustering;
}

/// Spectral clustering of a symmetric nonnegative weight matrix:
/// normalize W by D^{-1/2} on both sides (zero-degree rows stay zero), embed
/// each point with the k top eigenvectors, row-normalize, and run k-means.
inline Clustering spectral_cluster(const Matrix& w, int k, std::uint64_t seed,
                                   int restarts = 10, int threads = 1,
                                   std::vector<Index>* isolated_out = nullptr) {
  const Index n = w.rows();
  require(w.cols() == n, "spectral_cluster: W must be square");
  require(k >= 1, "spectral_cluster: k must be >= 1");
  require(k <= n, "spectral_cluster: more clusters than points");

  Vector inv_sqrt_deg(n);
  std::vector<Index> isolated;
  for (Index i = 0; i < n; ++i) {
    const double d = w.row(i).sum();
    if (d > 0.0) {
      inv_sqrt_deg[i] = 1.0 / std::sqrt(d);
    } else {
      inv_sqrt_deg[i] = 0.0;
      isolated.push_back(i);
    }
  }
  if (isolated_out) *isolated_out = isolated;

  Matrix l = inv_sqrt_deg.asDiagonal() * w * inv_sqrt_deg.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(l);
  if (es.info() != Eigen::Success)
    throw NumericalError("spectral_cluster: eigendecomposition failed");
  Matrix u = es.eigenvectors().rightCols(k);  // k largest eigenvalues
  for (Index i = 0; i < n; ++i) {
    const double norm = u.row(i).norm();
    if (norm > 0.0) u.row(i) /= norm;
  }
  return kmeans(u, k, restarts, seed, threads);
}

}  // namespace kscc
