#include "shellxy/energy.hpp"

#include <cmath>
#include <numbers>

#include "shellxy/error.hpp"

namespace shellxy {

namespace {

void require_aligned(const Triangulation& tri, const FrameField& frames,
                     const DiscreteField& field) {
  if (field.theta.size() != tri.num_vertices() || frames.size() != tri.num_vertices()) {
    throw Error(ErrorCode::LengthMismatch, "field, frames and mesh have different lengths");
  }
}

}  // namespace

double xy_energy(const Triangulation& tri, const FrameField& frames, const DiscreteField& field) {
  require_aligned(tri, frames, field);
  return kernels::parallel::xy_energy(tri.edges(), tri.stiffness(), realize(field, frames));
}

double xy_energy(const Triangulation& tri, const FrameField& frames, const DiscreteField& field,
                 const std::vector<int>& region) {
  require_aligned(tri, frames, field);
  const std::vector<double> per = triangle_energies(tri, realize(field, frames));
  double s = 0.0;
  for (int t : region) s += per[t];
  return s;
}

std::vector<double> triangle_energies(const Triangulation& tri, const std::vector<Vec3>& v) {
  if (v.size() != tri.num_vertices()) {
    throw Error(ErrorCode::LengthMismatch, "field and mesh have different lengths");
  }
  std::vector<double> out(tri.num_triangles());
  kernels::parallel::triangle_energies(tri.triangles(), tri.half_cots(), v, out);
  return out;
}

std::vector<double> xy_gradient(const Triangulation& tri, const FrameField& frames,
                                const DiscreteField& field) {
  require_aligned(tri, frames, field);
  const std::size_t n = tri.num_vertices();
  std::vector<Vec3> v(n), dv(n);
  kernels::parallel::realize(field.theta, frames.e1, frames.e2, v, dv);
  std::vector<double> g(n);
  kernels::parallel::xy_gradient(tri.adjacency(), tri.stiffness(), v, dv, g);
  return g;
}

double extrinsic_energy(const Surface& surface, const TangentField& u, int resolution,
                        EnergyWeighting weighting) {
  if (surface.kind() == SurfaceKind::Sphere) {
    throw Error(ErrorCode::HairyBallUnsupported,
                "the sphere carries no smooth unit tangent field");
  }
  if (resolution < 32) {
    throw Error(ErrorCode::QuadratureTooCoarse, "quadrature resolution must be >= 32");
  }
  const Vec2 period = surface.parameter_periods();
  const Vec2 origin = surface.kind() == SurfaceKind::GraphBump ? Vec2(-0.5 * period) : Vec2::Zero();
  const double du = period.x() / resolution;
  const double dv = period.y() / resolution;
  const double h = 1e-5;

  double total = 0.0;
  for (int i = 0; i < resolution; ++i) {
    double row = 0.0;
    for (int j = 0; j < resolution; ++j) {
      const double s = origin.x() + (i + 0.5) * du;
      const double t = origin.y() + (j + 0.5) * dv;
      const Vec3 p = surface.chart(s, t);
      const Vec3 n = surface.normal(p);
      const Vec3 xs = surface.chart_du(s, t);
      const Vec3 xt = surface.chart_dv(s, t);
      Vec3 w = u(p);
      w -= w.dot(n) * n;

      Vec3 ds = (u(surface.chart(s + h, t)) - u(surface.chart(s - h, t))) / (2.0 * h);
      Vec3 dt = (u(surface.chart(s, t + h)) - u(surface.chart(s, t - h))) / (2.0 * h);
      ds -= ds.dot(n) * n;
      dt -= dt.dot(n) * n;
      Eigen::Matrix2d G;
      G << xs.dot(xs), xs.dot(xt), xs.dot(xt), xt.dot(xt);
      const Eigen::Matrix2d Ginv = G.inverse();
      const double cov = Ginv(0, 0) * ds.dot(ds) + 2.0 * Ginv(0, 1) * ds.dot(dt) +
                         Ginv(1, 1) * dt.dot(dt);
      const double shape = surface.shape_operator(p, w).squaredNorm();

      double density = 0.0;
      switch (weighting) {
        case EnergyWeighting::NematicShell: density = cov + 0.5 * shape; break;
        case EnergyWeighting::FullSurfaceGradient: density = cov + shape; break;
        case EnergyWeighting::HalfSurfaceGradient: density = 0.5 * (cov + shape); break;
      }
      row += density * xs.cross(xt).norm();
    }
    total += row;
  }
  return total * du * dv;
}

double renormalized_remainder(double energy, double eps, int K) {
  if (!(eps > 0.0)) throw Error(ErrorCode::PreconditionViolated, "eps must be positive");
  return energy - K * std::numbers::pi * std::log(1.0 / eps);
}

EnergyBreakdown energy_breakdown(const Triangulation& tri, const FrameField& frames,
                                 const DiscreteField& field, int defect_count,
                                 const std::map<std::string, std::vector<int>>& regions) {
  EnergyBreakdown b;
  b.total = xy_energy(tri, frames, field);
  b.defect_count = defect_count;
  b.log_eps = std::log(tri.mesh_size());
  b.renormalized_remainder = renormalized_remainder(b.total, tri.mesh_size(), defect_count);
  if (!regions.empty()) {
    const std::vector<double> per = triangle_energies(tri, realize(field, frames));
    for (const auto& [name, tris] : regions) {
      double s = 0.0;
      for (int t : tris) s += per[t];
      b.per_region[name] = s;
    }
  }
  return b;
}

}  // namespace shellxy
