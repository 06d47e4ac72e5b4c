#pragma once

#include "kscc/common.hpp"
#include "kscc/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kscc {

enum class DatasetFamily {
  circles,
  lines_and_circles,
  spheres,
  spheres_and_plane,
  conics,
  lissajous,
};

inline std::string_view family_name(DatasetFamily f) {
  switch (f) {
    case DatasetFamily::circles: return "circles";
    case DatasetFamily::lines_and_circles: return "lines_and_circles";
    case DatasetFamily::spheres: return "spheres";
    case DatasetFamily::spheres_and_plane: return "spheres_and_plane";
    case DatasetFamily::conics: return "conics";
    case DatasetFamily::lissajous: return "lissajous";
  }
  return "?";
}

inline DatasetFamily parse_family(std::string_view s) {
  for (auto f : {DatasetFamily::circles, DatasetFamily::lines_and_circles,
                 DatasetFamily::spheres, DatasetFamily::spheres_and_plane,
                 DatasetFamily::conics, DatasetFamily::lissajous}) {
    if (family_name(f) == s) return f;
  }
  throw InputError("unknown dataset family: " + std::string(s));
}

// ---- surface descriptors ---------------------------------------------------

struct Circle {
  Eigen::Vector2d center;
  double radius;
};
struct LineSegment {
  Eigen::Vector2d p0, p1;
};
struct SphereSurface {
  Eigen::Vector3d center;
  double radius;
};
struct PlanePatch {
  Eigen::Vector3d origin, u, v;  // point = origin + s*u + t*v
  double s_min, s_max, t_min, t_max;
};
struct EllipseCurve {
  Eigen::Vector2d center;
  double a, b;  // semi-axes
};
struct ParabolaCurve {
  double coeff;  // y = coeff * x^2
  double x_min, x_max;
};
struct HyperbolaCurve {
  double c;  // x*y = c, both branches
  double x_min, x_max;  // 0 < x_min < x_max, mirrored for the second branch
};
struct LissajousCurve {
  double amp_x, amp_y;  // A, B
  double freq_x, freq_y;  // a, b with a/b = 2
  double phase;  // delta
};

using Surface =
    std::variant<Circle, LineSegment, SphereSurface, PlanePatch, EllipseCurve,
                 ParabolaCurve, HyperbolaCurve, LissajousCurve>;

inline Index surface_ambient_dim(const Surface& s) {
  if (std::holds_alternative<SphereSurface>(s) ||
      std::holds_alternative<PlanePatch>(s))
    return 3;
  return 2;
}

namespace detail {

inline void validate_surface(const Surface& s) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Circle>) {
          require(v.radius > 0.0, "circle: radius must be positive");
        } else if constexpr (std::is_same_v<T, LineSegment>) {
          require((v.p1 - v.p0).norm() > 0.0,
                  "line segment: endpoints coincide");
        } else if constexpr (std::is_same_v<T, SphereSurface>) {
          require(v.radius > 0.0, "sphere: radius must be positive");
        } else if constexpr (std::is_same_v<T, PlanePatch>) {
          require(v.u.cross(v.v).norm() > 0.0,
                  "plane: spanning vectors are collinear");
          require(v.s_max > v.s_min && v.t_max > v.t_min,
                  "plane: empty parameter patch");
        } else if constexpr (std::is_same_v<T, EllipseCurve>) {
          require(v.a > 0.0 && v.b > 0.0,
                  "ellipse: semi-axes must be positive");
        } else if constexpr (std::is_same_v<T, ParabolaCurve>) {
          require(v.coeff != 0.0, "parabola: zero leading coefficient");
          require(v.x_max > v.x_min, "parabola: empty parameter range");
        } else if constexpr (std::is_same_v<T, HyperbolaCurve>) {
          require(v.c != 0.0, "hyperbola: degenerate (c = 0)");
          require(v.x_min > 0.0 && v.x_max > v.x_min,
                  "hyperbola: need 0 < x_min < x_max");
        } else if constexpr (std::is_same_v<T, LissajousCurve>) {
          require(v.amp_x != 0.0 && v.amp_y != 0.0,
                  "lissajous: zero amplitude");
          require(v.freq_y > 0.0, "lissajous: frequency b must be positive");
          require(v.freq_x == 2.0 * v.freq_y,
                  "lissajous: frequency ratio a/b must equal 2");
        }
      },
      s);
}

inline Eigen::VectorXd sample_surface(const Surface& s, Rng& rng) {
  return std::visit(
      [&rng](const auto& v) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(v)>;
        constexpr double two_pi = 2.0 * std::numbers::pi;
        if constexpr (std::is_same_v<T, Circle>) {
          const double th = rng.uniform(0.0, two_pi);
          Eigen::Vector2d p =
              v.center + v.radius * Eigen::Vector2d(std::cos(th), std::sin(th));
          return p;
        } else if constexpr (std::is_same_v<T, LineSegment>) {
          const double t = rng.uniform();
          Eigen::Vector2d p = v.p0 + t * (v.p1 - v.p0);
          return p;
        } else if constexpr (std::is_same_v<T, SphereSurface>) {
          // area-uniform: z uniform on [-1,1], azimuth uniform
          const double z = rng.uniform(-1.0, 1.0);
          const double phi = rng.uniform(0.0, two_pi);
          const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
          Eigen::Vector3d p =
              v.center + v.radius * Eigen::Vector3d(rho * std::cos(phi),
                                                    rho * std::sin(phi), z);
          return p;
        } else if constexpr (std::is_same_v<T, PlanePatch>) {
          const double su = rng.uniform(v.s_min, v.s_max);
          const double tv = rng.uniform(v.t_min, v.t_max);
          Eigen::Vector3d p = v.origin + su * v.u + tv * v.v;
          return p;
        } else if constexpr (std::is_same_v<T, EllipseCurve>) {
          const double th = rng.uniform(0.0, two_pi);
          Eigen::Vector2d p =
              v.center + Eigen::Vector2d(v.a * std::cos(th), v.b * std::sin(th));
          return p;
        } else if constexpr (std::is_same_v<T, ParabolaCurve>) {
          const double x = rng.uniform(v.x_min, v.x_max);
          return Eigen::Vector2d(x, v.coeff * x * x);
        } else if constexpr (std::is_same_v<T, HyperbolaCurve>) {
          const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
          const double x = sign * rng.uniform(v.x_min, v.x_max);
          return Eigen::Vector2d(x, v.c / x);
        } else {  // LissajousCurve
          const double t = rng.uniform(0.0, two_pi / v.freq_y);
          return Eigen::Vector2d(
              v.amp_x * std::sin(v.freq_x * t + v.phase),
              v.amp_y * std::sin(v.freq_y * t));
        }
      },
      s);
}

inline bool same_surface(const Surface& a, const Surface& b) {
  if (a.index() != b.index()) return false;
  auto params = [](const Surface& s) {
    return std::visit(
        [](const auto& v) -> std::vector<double> {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Circle>) {
            return {v.center.x(), v.center.y(), v.radius};
          } else if constexpr (std::is_same_v<T, LineSegment>) {
            return {v.p0.x(), v.p0.y(), v.p1.x(), v.p1.y()};
          } else if constexpr (std::is_same_v<T, SphereSurface>) {
            return {v.center.x(), v.center.y(), v.center.z(), v.radius};
          } else if constexpr (std::is_same_v<T, PlanePatch>) {
            return {v.origin.x(), v.origin.y(), v.origin.z(),
                    v.u.x(),      v.u.y(),      v.u.z(),
                    v.v.x(),      v.v.y(),      v.v.z(),
                    v.s_min,      v.s_max,      v.t_min,     v.t_max};
          } else if constexpr (std::is_same_v<T, EllipseCurve>) {
            return {v.center.x(), v.center.y(), v.a, v.b};
          } else if constexpr (std::is_same_v<T, ParabolaCurve>) {
            return {v.coeff, v.x_min, v.x_max};
          } else if constexpr (std::is_same_v<T, HyperbolaCurve>) {
            return {v.c, v.x_min, v.x_max};
          } else {
            const auto& l = static_cast<const LissajousCurve&>(v);
            return {l.amp_x, l.amp_y, l.freq_x, l.freq_y, l.phase};
          }
        },
        s);
  };
  return params(a) == params(b);
}

inline bool family_allows(DatasetFamily f, const Surface& s) {
  switch (f) {
    case DatasetFamily::circles:
      return std::holds_alternative<Circle>(s);
    case DatasetFamily::lines_and_circles:
      return std::holds_alternative<Circle>(s) ||
             std::holds_alternative<LineSegment>(s);
    case DatasetFamily::spheres:
      return std::holds_alternative<SphereSurface>(s);
    case DatasetFamily::spheres_and_plane:
      return std::holds_alternative<SphereSurface>(s) ||
             std::holds_alternative<PlanePatch>(s);
    case DatasetFamily::conics:
      return std::holds_alternative<Circle>(s) ||
             std::holds_alternative<EllipseCurve>(s) ||
             std::holds_alternative<ParabolaCurve>(s) ||
             std::holds_alternative<HyperbolaCurve>(s);
    case DatasetFamily::lissajous:
      return std::holds_alternative<LissajousCurve>(s);
  }
  return false;
}

}  // namespace detail

struct DatasetSpec {
  DatasetFamily family = DatasetFamily::circles;
  std::vector<Surface> surfaces;
  Index points_per_surface = 100;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    require(!surfaces.empty(), "dataset: no surfaces");
    require(points_per_surface >= 1, "dataset: points_per_surface must be >= 1");
    require(noise_sigma >= 0.0, "dataset: noise_sigma must be >= 0");
    const Index dim = surface_ambient_dim(surfaces.front());
    for (const auto& s : surfaces) {
      detail::validate_surface(s);
      require(detail::family_allows(family, s),
              "dataset: surface kind not allowed in family '" +
                  std::string(family_name(family)) + "'");
      require(surface_ambient_dim(s) == dim,
              "dataset: mixed ambient dimensions");
    }
    for (std::size_t a = 0; a < surfaces.size(); ++a)
      for (std::size_t b = a + 1; b < surfaces.size(); ++b)
        require(!detail::same_surface(surfaces[a], surfaces[b]),
                "dataset: two identical surfaces");
  }

  Index ambient_dim() const { return surface_ambient_dim(surfaces.front()); }
};

struct Dataset {
  Matrix points;            // N x D
  std::vector<int> labels;  // generating surface per point
};

/// Samples every surface uniformly in its natural parameter, then adds the
/// isotropic Gaussian noise in a second pass so that a given seed produces
/// the same base coordinates at every noise level.
inline Dataset generate(const DatasetSpec& spec) {
  spec.validate();
  const Index k = static_cast<Index>(spec.surfaces.size());
  const Index n = k * spec.points_per_surface;
  const Index dim = spec.ambient_dim();

  Dataset out;
  out.points.resize(n, dim);
  out.labels.resize(static_cast<std::size_t>(n));

  Rng rng(mix_seed(spec.seed, 0x67656e64));
  Index row = 0;
  for (Index s = 0; s < k; ++s) {
    for (Index p = 0; p < spec.points_per_surface; ++p, ++row) {
      out.points.row(row) =
          detail::sample_surface(spec.surfaces[static_cast<std::size_t>(s)], rng)
              .transpose();
      out.labels[static_cast<std::size_t>(row)] = static_cast<int>(s);
    }
  }
  if (spec.noise_sigma > 0.0) {
    Rng noise(mix_seed(spec.seed, 0x6e6f6973));
    for (Index i = 0; i < n; ++i)
      for (Index d = 0; d < dim; ++d)
        out.points(i, d) += spec.noise_sigma * noise.normal();
  }
  return out;
}

// ---- synthetic two-view scene ----------------------------------------------

/// Two-view correspondence scene: each motion applies its own rigid
/// transform between the views and both views project through a unit-focal
/// pinhole camera. Correspondence rows are (x1, y1, x2, y2).
struct TwoViewSceneSpec {
  int motions = 2;
  Index points_per_motion = 150;
  double noise_sigma = 0.0;  // image-plane noise
  std::uint64_t seed = 0;
};

inline Dataset generate_two_view(const TwoViewSceneSpec& spec) {
  require(spec.motions >= 1, "two_view: need at least one motion");
  require(spec.points_per_motion >= 1, "two_view: need points");
  require(spec.noise_sigma >= 0.0, "two_view: noise_sigma must be >= 0");

  const Index n = spec.motions * spec.points_per_motion;
  Dataset out;
  out.points.resize(n, 4);
  out.labels.resize(static_cast<std::size_t>(n));

  Rng rng(mix_seed(spec.seed, 0x32766965));
  Index row = 0;
  for (int m = 0; m < spec.motions; ++m) {
    Eigen::Vector3d axis(rng.normal(), rng.normal(), rng.normal());
    axis.normalize();
    const double angle = rng.uniform(0.2, 0.5);
    const Eigen::Matrix3d rot =
        Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    Eigen::Vector3d trans(rng.normal(), rng.normal(), rng.normal());
    trans = trans.normalized() * rng.uniform(0.8, 1.6);

    for (Index p = 0; p < spec.points_per_motion; ++p, ++row) {
      Eigen::Vector3d x1, x2;
      do {
        const double z = rng.uniform(3.0, 6.0);
        x1 = Eigen::Vector3d(rng.uniform(-0.8, 0.8) * z,
                             rng.uniform(-0.8, 0.8) * z, z);
        x2 = rot * x1 + trans;
      } while (x2.z() < 1.0);
      out.points(row, 0) = x1.x() / x1.z();
      out.points(row, 1) = x1.y() / x1.z();
      out.points(row, 2) = x2.x() / x2.z();
      out.points(row, 3) = x2.y() / x2.z();
      out.labels[static_cast<std::size_t>(row)] = m;
    }
  }
  if (spec.noise_sigma > 0.0) {
    Rng noise(mix_seed(spec.seed, 0x6e763276));
    for (Index i = 0; i < n; ++i)
      for (Index d = 0; d < 4; ++d)
        out.points(i, d) += spec.noise_sigma * noise.normal();
  }
  return out;
}

}  // namespace kscc
