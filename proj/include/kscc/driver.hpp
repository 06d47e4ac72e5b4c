#pragma once

#include "kscc/common.hpp"
#include "kscc/curvature.hpp"
#include "kscc/kernels.hpp"
#include "kscc/parallel.hpp"
#include "kscc/rng.hpp"
#include "kscc/spectral.hpp"
#include "kscc/weights.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace kscc {

using SampleSet = std::vector<TupleIndex>;

struct KsccConfig {
  int ell = 0;  // flat dimension in feature space
  int k = 0;    // number of manifolds
  Index c = 0;  // sampled tuples per iteration; 0 means the 100*k default
  int max_outer_iters = 20;
  double kls_rel_tol = 1e-3;
  std::uint64_t seed = 0;
  int restarts_kmeans = 10;
  int outer_restarts = 1;    // independent reruns, best final KLS wins
  bool resweep_sigma = true; // false freezes iteration 0's sigma values
  int threads = 1;

  Index effective_c() const { return c > 0 ? c : 100 * static_cast<Index>(k); }

  void validate(Index n) const {
    require(ell >= 1, "config: ell must be >= 1");
    require(k >= 1, "config: k must be >= 1");
    require(effective_c() >= k, "config: c must be >= k");
    require(max_outer_iters >= 1, "config: max_outer_iters must be >= 1");
    require(kls_rel_tol >= 0.0, "config: kls_rel_tol must be >= 0");
    require(restarts_kmeans >= 1, "config: kmeans restarts must be >= 1");
    require(outer_restarts >= 1, "config: outer_restarts must be >= 1");
    require(n > ell + 1, "config: need more than ell+1 points");
  }
};

struct IterationStat {
  double kls = 0.0;      // e_KLS of the iteration's accepted partition
  int p = 0;             // winning sweep exponent
  double sigma_sq = 0.0; // winning sigma^2
};

struct RunReport {
  Clustering labels;
  std::vector<double> kls_history;
  std::vector<IterationStat> sigma_chosen;
  int iterations = 0;
  double wall_time = 0.0;
  double kls_best = std::numeric_limits<double>::infinity();
  double kls_best_sq = std::numeric_limits<double>::infinity();
  Index isolated_points = 0;  // zero-degree rows in the winning W
};

/// c tuples of ell+1 distinct indices, drawn uniformly from [0, n).
inline SampleSet sample_tuples_uniform(Index n, int ell, Index c,
                                       std::uint64_t seed) {
  require(n > ell + 1, "sampling: need more than ell+1 points");
  require(c >= 1, "sampling: c must be >= 1");
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  Rng rng(mix_seed(seed, 0x73616d70));
  SampleSet set;
  set.reserve(static_cast<std::size_t>(c));
  for (Index r = 0; r < c; ++r)
    set.emplace_back(rng.sample_distinct(pool, static_cast<std::size_t>(ell) + 1));
  return set;
}

/// floor(c/K) tuples per cluster with the remainder going to the largest
/// clusters; a cluster with fewer than ell+1 points has its quota drawn from
/// the full data set instead.
inline SampleSet sample_tuples_from_clusters(const Clustering& clustering,
                                             int ell, Index c,
                                             std::uint64_t seed) {
  const Index n = clustering.size();
  require(n > ell + 1, "sampling: need more than ell+1 points");
  require(c >= 1, "sampling: c must be >= 1");
  clustering.validate();
  const int k = clustering.k;
  require(k >= 1, "sampling: clustering has no clusters");

  std::vector<std::vector<Index>> members(static_cast<std::size_t>(k));
  for (Index i = 0; i < n; ++i)
    members[static_cast<std::size_t>(clustering.labels[i])].push_back(i);
  std::vector<Index> everything(static_cast<std::size_t>(n));
  std::iota(everything.begin(), everything.end(), Index{0});

  std::vector<Index> quota(static_cast<std::size_t>(k), c / k);
  {
    Index rem = c % k;
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return members[static_cast<std::size_t>(a)].size() >
             members[static_cast<std::size_t>(b)].size();
    });
    for (Index r = 0; r < rem; ++r)
      ++quota[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
  }

  Rng rng(mix_seed(seed, 0x636c7573));
  const std::size_t tuple_len = static_cast<std::size_t>(ell) + 1;
  SampleSet set;
  set.reserve(static_cast<std::size_t>(c));
  for (int cl = 0; cl < k; ++cl) {
    const auto& own = members[static_cast<std::size_t>(cl)];
    const std::vector<Index>& pool =
        own.size() >= tuple_len ? own : everything;
    for (Index r = 0; r < quota[static_cast<std::size_t>(cl)]; ++r)
      set.emplace_back(rng.sample_distinct(pool, tuple_len));
  }
  return set;
}

/// Total kernel least squares error of the partition: per cluster, the
/// eigenvalue tail (past the top ell) of the centered Gram block, negatives
/// clamped. Returns the squared total.
inline double kls_error_sq(const Matrix& k, const Clustering& clustering,
                           int ell) {
  require(ell >= 0, "kls: ell must be >= 0");
  require(clustering.size() == k.rows(), "kls: label count mismatch");
  clustering.validate();
  std::vector<std::vector<Index>> members(
      static_cast<std::size_t>(clustering.k));
  for (Index i = 0; i < clustering.size(); ++i)
    members[static_cast<std::size_t>(clustering.labels[i])].push_back(i);

  double total = 0.0;
  for (const auto& idx : members) {
    const Index m = static_cast<Index>(idx.size());
    if (m <= ell) continue;  // no eigenvalues past position ell
    Matrix block(m, m);
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b)
        block(a, b) = k(idx[static_cast<std::size_t>(a)],
                        idx[static_cast<std::size_t>(b)]);
    const Matrix centered = center_kernel_block(block);
    Eigen::SelfAdjointEigenSolver<Matrix> es(centered,
                                             Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericalError("kls: eigendecomposition failed");
    const Vector& eig = es.eigenvalues();  // ascending
    for (Index i = 0; i < m - ell; ++i)
      if (eig[i] > 0.0) total += eig[i];
  }
  return total;
}

inline double kls_error(const Matrix& k, const Clustering& clustering,
                        int ell) {
  return std::sqrt(kls_error_sq(k, clustering, ell));
}

namespace detail {

struct SweepBranch {
  double kls = std::numeric_limits<double>::infinity();
  double sigma_sq = 0.0;
  Clustering clustering;
  Index isolated = 0;
};

inline RunReport run_kscc_on_gram(const Matrix& gram, const KsccConfig& cfg,
                                  std::uint64_t seed) {
  const Index n = gram.rows();
  const Index c = cfg.effective_c();
  const int sweep_len = cfg.ell + 1;

  RunReport report;
  std::vector<double> frozen_sigma;  // per-p values from iteration 0
  Clustering current;                // resampling source
  int stall_count = 0;

  for (int iter = 0; iter < cfg.max_outer_iters; ++iter) {
    const SampleSet samples =
        iter == 0
            ? sample_tuples_uniform(n, cfg.ell, c, mix_seed(seed, 1, iter))
            : sample_tuples_from_clusters(current, cfg.ell, c,
                                          mix_seed(seed, 1, iter));

    std::vector<CurvatureColumn> columns(samples.size());
    parallel_for(samples.size(), cfg.threads, [&](std::size_t r) {
      columns[r] = curvature_column(gram, samples[r]);
    });
    const SortedCurvatures sorted = collect_sorted_curvatures(columns);

    std::vector<SweepBranch> branches(static_cast<std::size_t>(sweep_len));
    parallel_for(branches.size(), cfg.threads, [&](std::size_t bi) {
      const int p = static_cast<int>(bi) + 1;
      SweepBranch& br = branches[bi];
      br.sigma_sq = (!cfg.resweep_sigma && !frozen_sigma.empty())
                        ? frozen_sigma[bi]
                        : sigma_sq_from_sweep(sorted, n, c, cfg.k, p);
      const Matrix affinities = affinity_matrix(columns, br.sigma_sq);
      const Matrix w = estimate_weights(affinities);
      std::vector<Index> isolated;
      br.clustering =
          spectral_cluster(w, cfg.k, mix_seed(seed, 2, iter, bi),
                           cfg.restarts_kmeans, /*threads=*/1, &isolated);
      br.isolated = static_cast<Index>(isolated.size());
      br.kls = kls_error(gram, br.clustering, cfg.ell);
    });
    if (cfg.resweep_sigma == false && frozen_sigma.empty()) {
      frozen_sigma.resize(branches.size());
      for (std::size_t bi = 0; bi < branches.size(); ++bi)
        frozen_sigma[bi] = branches[bi].sigma_sq;
    }

    std::size_t win = 0;
    for (std::size_t bi = 1; bi < branches.size(); ++bi)
      if (branches[bi].kls < branches[win].kls) win = bi;
    SweepBranch& winner = branches[win];

    report.kls_history.push_back(winner.kls);
    report.sigma_chosen.push_back(
        {winner.kls, static_cast<int>(win) + 1, winner.sigma_sq});
    ++report.iterations;
    if (winner.kls < report.kls_best) {
      report.kls_best = winner.kls;
      report.labels = winner.clustering;
      report.isolated_points = winner.isolated;
    }

    // Convergence: two consecutive iterations with relative improvement
    // below tolerance (a worsening counts as no improvement).
    if (iter >= 1) {
      const double prev = report.kls_history[static_cast<std::size_t>(iter) - 1];
      const double rel =
          (prev - winner.kls) / std::max(prev, 1e-300);
      stall_count = (rel < cfg.kls_rel_tol) ? stall_count + 1 : 0;
      if (stall_count >= 2) {
        current = std::move(winner.clustering);
        break;
      }
    }
    current = std::move(winner.clustering);
  }

  report.kls_best_sq = report.kls_best * report.kls_best;
  return report;
}

}  // namespace detail

/// Full pipeline on a precomputed Gram matrix.
inline RunReport run_kscc_gram(const Matrix& gram, const KsccConfig& cfg) {
  require(gram.rows() == gram.cols(), "run_kscc: Gram matrix must be square");
  cfg.validate(gram.rows());
  const auto t0 = std::chrono::steady_clock::now();

  RunReport best;
  for (int r = 0; r < cfg.outer_restarts; ++r) {
    RunReport rep =
        detail::run_kscc_on_gram(gram, cfg, mix_seed(cfg.seed, 0, r));
    if (rep.kls_best < best.kls_best) best = std::move(rep);
  }

  best.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return best;
}

/// Builds the Gram matrix for `spec` and runs the iterated sampling loop.
inline RunReport run_kscc(const Eigen::Ref<const Matrix>& points,
                          const KernelSpec& spec, const KsccConfig& cfg) {
  spec.check_dim(points.cols());
  cfg.validate(points.rows());
  const auto t0 = std::chrono::steady_clock::now();
  const Matrix gram = build_kernel_matrix(spec, points, cfg.threads);
  RunReport report = run_kscc_gram(gram, cfg);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

}  // namespace kscc
