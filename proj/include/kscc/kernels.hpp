#pragma once

#include "kscc/common.hpp"
#include "kscc/parallel.hpp"

#include <string>
#include <string_view>

namespace kscc {

/// Closed-form kernels under which the supported parametric surfaces become
/// affine subspaces of the (implicit) feature space.
enum class KernelVariant {
  linear,         // <x,y>; plain flats, no embedding
  spherical,      // <x,y> + |x|^2 |y|^2; circles/spheres -> D-flats
  quad_standard,  // <x,y> + <x.^2,y.^2>
  quad_full,      // (1 + <x,y>)^2; conics -> 4-flats on R^2
  lissajous_cheb, // (1 + T1(x1)T1(y1) + T2(x2)T2(y2))^2 on R^2
  two_view,       // factorized Kronecker lift of 4-D correspondences
};

struct KernelSpec {
  KernelVariant variant = KernelVariant::linear;

  KernelSpec() = default;
  explicit KernelSpec(KernelVariant v) : variant(v) {}

  std::string_view name() const {
    switch (variant) {
      case KernelVariant::linear: return "linear";
      case KernelVariant::spherical: return "spherical";
      case KernelVariant::quad_standard: return "quad_standard";
      case KernelVariant::quad_full: return "quad_full";
      case KernelVariant::lissajous_cheb: return "lissajous_cheb";
      case KernelVariant::two_view: return "two_view";
    }
    return "?";
  }

  static KernelSpec parse(std::string_view s) {
    for (auto v : {KernelVariant::linear, KernelVariant::spherical,
                   KernelVariant::quad_standard, KernelVariant::quad_full,
                   KernelVariant::lissajous_cheb, KernelVariant::two_view}) {
      if (KernelSpec(v).name() == s) return KernelSpec(v);
    }
    throw InputError("unknown kernel variant: " + std::string(s));
  }

  /// Required ambient dimension; 0 means any D >= 1 is accepted.
  Index required_dim() const {
    switch (variant) {
      case KernelVariant::lissajous_cheb: return 2;
      case KernelVariant::two_view: return 4;
      default: return 0;
    }
  }

  bool accepts_dim(Index d) const {
    if (d < 1) return false;
    const Index req = required_dim();
    return req == 0 || d == req;
  }

  /// Flat dimension of the embedded surfaces: one less than the number of
  /// affinely independent feature coordinates.
  Index default_flat_dim(Index d) const {
    check_dim(d);
    switch (variant) {
      case KernelVariant::linear: return d - 1;
      case KernelVariant::spherical: return d;
      case KernelVariant::quad_standard: return 2 * d - 1;
      case KernelVariant::quad_full: return 2 * d + d * (d - 1) / 2 - 1;
      case KernelVariant::lissajous_cheb: return 4;
      case KernelVariant::two_view: return 7;
    }
    return 0;
  }

  void check_dim(Index d) const {
    if (!accepts_dim(d))
      throw InputError("kernel '" + std::string(name()) +
                       "' does not accept input dimension " +
                       std::to_string(d));
  }
};

namespace detail {
// Chebyshev polynomials of the first kind, degrees 1 and 2.
inline double cheb1(double u) { return u; }
inline double cheb2(double u) { return 2.0 * u * u - 1.0; }
}  // namespace detail

inline double eval_kernel(const KernelSpec& spec,
                          const Eigen::Ref<const Vector>& x,
                          const Eigen::Ref<const Vector>& y) {
  if (x.size() != y.size())
    throw InputError("eval_kernel: mismatched point dimensions");
  spec.check_dim(x.size());
  switch (spec.variant) {
    case KernelVariant::linear:
      return x.dot(y);
    case KernelVariant::spherical:
      return x.dot(y) + x.squaredNorm() * y.squaredNorm();
    case KernelVariant::quad_standard:
      return x.dot(y) + x.array().square().matrix().dot(
                            y.array().square().matrix());
    case KernelVariant::quad_full: {
      const double s = 1.0 + x.dot(y);
      return s * s;
    }
    case KernelVariant::lissajous_cheb: {
      const double s = 1.0 + detail::cheb1(x[0]) * detail::cheb1(y[0]) +
                       detail::cheb2(x[1]) * detail::cheb2(y[1]);
      return s * s;
    }
    case KernelVariant::two_view:
      // x = (x1, y1, x2, y2) correspondences from two views
      return (x[0] * y[0] + x[1] * y[1] + 1.0) *
             (x[2] * y[2] + x[3] * y[3] + 1.0);
  }
  return 0.0;
}

/// Gram matrix of the point set (rows of `points`). Each unordered pair is
/// evaluated once, so the result is symmetric exactly and independent of the
/// thread count.
inline Matrix build_kernel_matrix(const KernelSpec& spec,
                                  const Eigen::Ref<const Matrix>& points,
                                  int threads = 1) {
  const Index n = points.rows();
  require(n >= 1, "build_kernel_matrix: need at least one point");
  spec.check_dim(points.cols());
  Matrix k(n, n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ui) {
    const Index i = static_cast<Index>(ui);
    for (Index j = 0; j <= i; ++j) {
      const double v =
          eval_kernel(spec, points.row(i).transpose(), points.row(j).transpose());
      k(i, j) = v;
      k(j, i) = v;
    }
  });
  return k;
}

/// Double-centers a symmetric Gram block:
///   Kc = K - M K - K M + M K M,  M the m x m matrix with entries 1/m.
/// Row and column sums of the result are zero.
inline Matrix center_kernel_block(const Eigen::Ref<const Matrix>& block) {
  require(block.rows() == block.cols(),
          "center_kernel_block: block must be square");
  const Index m = block.rows();
  const Vector col_mean = block.colwise().mean();
  const Vector row_mean = block.rowwise().mean();
  const double total_mean = block.mean();
  Matrix out(m, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < m; ++i)
      out(i, j) = block(i, j) - row_mean[i] - col_mean[j] + total_mean;
  return out;
}

}  // namespace kscc
