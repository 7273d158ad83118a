#include "shellxy/renormalized.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "shellxy/energy.hpp"
#include "shellxy/error.hpp"

namespace shellxy {

namespace {

// Edge-midpoint rule: exact for quadratics on the flat triangle.
constexpr double kRule[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};

struct TriangleSplit {
  double extrinsic = 0.0;  // 1/2 int_T |dgamma[v_hat]|^2
  double covariant = 0.0;  // 1/2 int_T |P grad v_hat|^2
};

TriangleSplit split_triangle(const Triangulation& tri, const std::vector<Vec3>& v, int t) {
  const Surface& S = tri.surface();
  const Tri& T = tri.triangles()[t];
  const Vec3& x0 = tri.vertices()[T[0]];
  const Vec3& x1 = tri.vertices()[T[1]];
  const Vec3& x2 = tri.vertices()[T[2]];
  // Constant gradient of the affine interpolant: grad v_hat = sum_i v_i (x) grad lambda_i.
  const Vec3 nT = (x1 - x0).cross(x2 - x0);
  const double twice_area = nT.norm();
  const Vec3 unit = nT / twice_area;
  Eigen::Matrix3d grad = Eigen::Matrix3d::Zero();
  for (int c = 0; c < 3; ++c) {
    const Vec3& p = tri.vertices()[T[(c + 1) % 3]];
    const Vec3& q = tri.vertices()[T[(c + 2) % 3]];
    grad += v[T[c]] * (unit.cross(q - p) / twice_area).transpose();
  }
  TriangleSplit s;
  for (const auto& l : kRule) {
    const Vec3 x = l[0] * x0 + l[1] * x1 + l[2] * x2;
    const Vec3 p = S.project(x);
    const Vec3 n = S.normal(p);
    Vec3 w = l[0] * v[T[0]] + l[1] * v[T[1]] + l[2] * v[T[2]];
    w -= w.dot(n) * n;
    s.extrinsic += S.shape_operator(p, w).squaredNorm();
    s.covariant += (grad - n * (n.transpose() * grad)).squaredNorm();
  }
  const double weight = 0.5 * twice_area / 3.0;
  s.extrinsic *= 0.5 * weight;
  s.covariant *= 0.5 * weight;
  return s;
}

double disc_area(const Surface& S, const Vec3& centre, double r) {
  if (S.kind() == SurfaceKind::Sphere) {
    const double R = S.radius();
    return 2.0 * std::numbers::pi * R * R * (1.0 - std::cos(r / R));
  }
  return std::numbers::pi * r * r * (1.0 - S.gauss_curvature(centre) * r * r / 12.0);
}

}  // namespace

RenormalizedEstimate estimate_renormalized(const Triangulation& tri, const FrameField& frames,
                                           const DiscreteField& field, const DefectSet& defects,
                                           std::vector<double> delta_list) {
  const double eps = tri.mesh_size();
  const std::size_t K = defects.size();
  for (const Defect& d : defects) {
    if (std::abs(d.charge) != 1) {
      throw Error(ErrorCode::PreconditionViolated, "renormalized energy needs unit charges");
    }
  }
  std::sort(delta_list.begin(), delta_list.end(), std::greater<>());
  if (K > 0) {
    if (delta_list.empty()) throw Error(ErrorCode::DeltaTooSmall, "no delta values given");
    for (double delta : delta_list) {
      if (!(delta > 4.0 * eps)) {
        throw Error(ErrorCode::DeltaTooSmall,
                    "delta " + std::to_string(delta) + " is not above 4 eps = " +
                        std::to_string(4.0 * eps));
      }
    }
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = i + 1; j < K; ++j) {
        const double dist =
            tri.surface().geodesic_distance(defects[i].position, defects[j].position);
        if (!(dist > 2.0 * delta_list.front())) {
          throw Error(ErrorCode::DefectsTooClose,
                      "defects " + std::to_string(i) + " and " + std::to_string(j) +
                          " are closer than twice the largest delta");
        }
      }
  }

  const std::size_t nt = tri.num_triangles();
  const std::vector<Vec3> v = realize(field, frames);
  const std::vector<double> energy = triangle_energies(tri, v);
  std::vector<TriangleSplit> split(nt);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(nt); ++t)
    split[t] = split_triangle(tri, v, static_cast<int>(t));

  // Barycentre and vertex distances of each triangle to each defect.
  std::vector<std::vector<double>> bary(K, std::vector<double>(nt));
  std::vector<std::vector<double>> vmin(K, std::vector<double>(nt)), vmax(K, std::vector<double>(nt));
  for (std::size_t k = 0; k < K; ++k) {
    const std::vector<double> dist = vertex_distances(tri, defects[k].position);
    for (std::size_t t = 0; t < nt; ++t) {
      const Tri& T = tri.triangles()[t];
      bary[k][t] = (dist[T[0]] + dist[T[1]] + dist[T[2]]) / 3.0;
      vmin[k][t] = std::min({dist[T[0]], dist[T[1]], dist[T[2]]});
      vmax[k][t] = std::max({dist[T[0]], dist[T[1]], dist[T[2]]});
    }
  }

  RenormalizedEstimate r;
  double total_area = 0.0;
  for (std::size_t t = 0; t < nt; ++t) {
    r.total_energy += energy[t];
    r.extrinsic_term += split[t].extrinsic;
    total_area += tri.triangle_area(static_cast<int>(t));
  }
  if (K == 0 && delta_list.empty()) delta_list.push_back(0.0);

  for (double delta : delta_list) {
    double e = 0.0, ex = 0.0, cov = 0.0, area = 0.0, cut = 0.0, balls = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
      bool outside = true, straddles = false;
      for (std::size_t k = 0; k < K; ++k) {
        outside = outside && bary[k][t] >= delta;
        straddles = straddles || (vmin[k][t] < delta && vmax[k][t] >= delta);
      }
      const double a = tri.triangle_area(static_cast<int>(t));
      if (straddles) cut += a;
      if (!outside) continue;
      e += energy[t];
      ex += split[t].extrinsic;
      cov += split[t].covariant;
      area += a;
    }
    for (const Defect& d : defects) balls += disc_area(tri.surface(), d.position, delta);
    r.delta_values.push_back(delta);
    r.region_energy.push_back(e);
    r.region_extrinsic.push_back(ex);
    r.region_covariant.push_back(cov);
    r.decomposition_residual.push_back(e > 0.0 ? std::abs(e - cov - ex) / e : 0.0);
    r.area_residual.push_back(std::abs(area + balls - total_area));
    r.straddling_area.push_back(cut);
    const double log_term = K > 0 ? static_cast<double>(K) * std::numbers::pi * std::abs(std::log(delta)) : 0.0;
    r.intrinsic_partial.push_back(e - ex - log_term);
  }
  for (std::size_t i = 1; i < r.intrinsic_partial.size(); ++i)
    r.cauchy_differences.push_back(std::abs(r.intrinsic_partial[i] - r.intrinsic_partial[i - 1]));

  // Dyadic shells down to an inner radius of 4 eps.
  if (K > 0) {
    const double rho = delta_list.front();
    int shells = 0;
    while (rho * std::ldexp(1.0, -(shells + 1)) > 4.0 * eps) ++shells;
    const double inner = rho * std::ldexp(1.0, -shells);
    r.dyadic_shells.assign(K, {});
    for (std::size_t k = 0; k < K; ++k)
      for (int j = 0; j < shells; ++j) r.dyadic_shells[k].push_back({j, 0.0, 0.0});
    for (std::size_t t = 0; t < nt; ++t) {
      std::size_t nearest = 0;
      for (std::size_t k = 1; k < K; ++k)
        if (bary[k][t] < bary[nearest][t]) nearest = k;
      const double d = bary[nearest][t];
      if (d >= rho) {
        r.shell_outer_energy += energy[t];
      } else if (d < inner) {
        r.shell_inner_energy += energy[t];
      } else {
        const int j = std::min(shells - 1, static_cast<int>(std::floor(std::log2(rho / d))));
        r.dyadic_shells[nearest][j].energy += energy[t];
      }
    }
    for (auto& list : r.dyadic_shells)
      for (DyadicShell& s : list) s.excess = s.energy - std::numbers::pi * std::log(2.0);
  }
  return r;
}

}  // namespace shellxy
