#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <utility>

namespace shellxy {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Orthonormal right-handed frame (e1, e2, normal) attached to a surface point.
struct TangentBasis {
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();
  Vec3 normal = Vec3::UnitZ();
};

/// Orthonormal frame with e1 the tangential projection of `axis`, falling back to the
/// coordinate axis least aligned with `axis` (the y-axis for the default) when
/// |axis x normal| < 1e-6.
TangentBasis reference_frame(const Vec3& normal, const Vec3& axis = Vec3::UnitX());

enum class SurfaceKind { Sphere, Torus, GraphBump };

/// Analytic closed surface from a fixed catalogue.
///
/// Sphere(radius) is centred at the origin. Torus(major, minor) is the surface of revolution
/// around the z-axis. GraphBump(amplitude, width, period) is the graph z = f(x, y) of a smooth
/// bump that repeats with the given period in x and y; its quotient by the period lattice is a
/// flat-topology torus, and amplitude 0 gives the plane z = 0.
///
/// All queries are pure; a Surface is a small value type and safe to share between threads.
class Surface {
 public:
  static Surface sphere(double radius);
  static Surface torus(double major_radius, double minor_radius);
  static Surface graph_bump(double amplitude, double width, double period = 1.0);
  static Surface plane(double period = 1000.0) { return graph_bump(0.0, 1.0, period); }

  SurfaceKind kind() const { return kind_; }
  double radius() const { return a_; }
  double major_radius() const { return a_; }
  double minor_radius() const { return b_; }
  double amplitude() const { return a_; }
  double width() const { return b_; }
  double period() const { return c_; }

  int genus() const;
  int euler_characteristic() const { return 2 - 2 * genus(); }
  /// Sphere/torus: extrinsic diameter. GraphBump: diagonal of one period cell.
  double diameter() const;
  /// Thickness of the tubular neighbourhood on which `project` is defined: 0.9 / max |kappa|.
  double tube_thickness() const;
  /// Sphere: pi R. Torus: min(pi r, pi (R - r)) / 2. GraphBump: period / 2.
  double injectivity_radius() const;
  bool is_flat() const { return kind_ == SurfaceKind::GraphBump && a_ == 0.0; }
  /// Tolerance for "p lies on the surface".
  double on_surface_tolerance() const { return 1e-9 * diameter(); }

  // Chart. Sphere: (longitude, colatitude). Torus: (major angle, minor angle). GraphBump: (x, y).
  Vec3 chart(double u, double v) const;
  Vec3 chart_du(double u, double v) const;
  Vec3 chart_dv(double u, double v) const;
  /// Inverse chart for a point on the surface.
  Vec2 parameters(const Vec3& p) const;
  /// Parameter periods (u, v); the sphere colatitude is not periodic and reports pi.
  Vec2 parameter_periods() const;

  Vec3 normal(const Vec3& p) const;
  double gauss_curvature(const Vec3& p) const;
  /// Differential of the unit normal applied to a tangent vector.
  Vec3 shape_operator(const Vec3& p, const Vec3& x) const;
  /// Principal curvatures as eigenvalues of the shape operator, ascending.
  std::pair<double, double> principal_curvatures(const Vec3& p) const;

  /// Nearest-point projection onto the surface.
  Vec3 project(const Vec3& x) const;
  double distance_to_surface(const Vec3& x) const;

  /// Sphere: exact great-circle distance. Flat GraphBump: minimum-image Euclidean distance.
  /// Otherwise: Dijkstra on a reference parameter grid with chord edge lengths (error O(grid size)).
  double geodesic_distance(const Vec3& p, const Vec3& q, int refinement = 0) const;

  TangentBasis frame_at(const Vec3& p) const { return reference_frame(normal(p)); }

  // Local normal coordinates around `base` expressed in `basis`.
  // Sphere: exact exponential/log map. Others: orthogonal projection onto the tangent plane at
  // `base` (exact for the plane, agrees with normal coordinates up to O(|z|^2) otherwise).
  Vec3 exp_map(const Vec3& base, const TangentBasis& basis, const Vec2& z) const;
  Vec2 log_map(const Vec3& base, const TangentBasis& basis, const Vec3& p) const;
  /// Unit tangent vector at exp_map(z) obtained by pushing the plane direction `w` forward.
  Vec3 push_forward(const Vec3& base, const TangentBasis& basis, const Vec2& z,
                    const Vec2& w) const;

 private:
  Surface(SurfaceKind kind, double a, double b, double c) : kind_(kind), a_(a), b_(b), c_(c) {}

  void require_on_surface(const Vec3& p) const;
  Vec3 normal_unchecked(const Vec3& p) const;
  Vec3 shape_operator_unchecked(const Vec3& p, const Vec3& x) const;
  Vec3 project_unchecked(const Vec3& x) const;

  // GraphBump height function and its derivatives at (u, v).
  struct Height {
    double f, fu, fv, fuu, fuv, fvv;
  };
  Height height(double u, double v) const;

  SurfaceKind kind_;
  double a_;
  double b_;
  double c_;
};

}  // namespace shellxy
