#include "shellxy/field.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "shellxy/error.hpp"

namespace shellxy {

namespace {

constexpr double kPi = std::numbers::pi;

// Minimal rotation taking unit vector a to unit vector b, applied to x.
Vec3 rotate_between(const Vec3& a, const Vec3& b, const Vec3& x) {
  const Vec3 k = a.cross(b);
  const double c = a.dot(b);
  return c * x + k.cross(x) + k * (k.dot(x) / (1.0 + c));
}

}  // namespace

FrameField build_frames(const Triangulation& tri, const Vec3& axis) {
  FrameField f;
  const std::size_t n = tri.num_vertices();
  f.e1.resize(n);
  f.e2.resize(n);
  f.normal = tri.normals();
  for (std::size_t i = 0; i < n; ++i) {
    const TangentBasis b = reference_frame(f.normal[i], axis);
    f.e1[i] = b.e1;
    f.e2[i] = b.e2;
  }
  return f;
}

std::vector<Vec3> realize(const DiscreteField& field, const FrameField& frames) {
  if (field.theta.size() != frames.size()) {
    throw Error(ErrorCode::LengthMismatch, "field and frames have different lengths");
  }
  std::vector<Vec3> v(field.theta.size()), dv(field.theta.size());
  kernels::parallel::realize(field.theta, frames.e1, frames.e2, v, dv);
  return v;
}

DiscreteField restrict_smooth(const Triangulation& tri, const FrameField& frames,
                              const TangentField& f) {
  DiscreteField out;
  out.theta.resize(tri.num_vertices());
  for (std::size_t i = 0; i < tri.num_vertices(); ++i) {
    const Vec3 w = f(tri.vertices()[i]);
    if (!(w.norm() >= 1e-9)) {
      throw Error(ErrorCode::VanishingField, "field vanishes at vertex " + std::to_string(i));
    }
    out.theta[i] = std::atan2(w.dot(frames.e2[i]), w.dot(frames.e1[i]));
  }
  return out;
}

Vec3 interpolant_eval(const Triangulation& tri, const std::vector<Vec3>& v, int t,
                      const Vec3& lambda) {
  if (v.size() != tri.num_vertices()) {
    throw Error(ErrorCode::LengthMismatch, "field and mesh have different lengths");
  }
  if (lambda.minCoeff() < 0.0 || std::abs(lambda.sum() - 1.0) > 1e-12) {
    throw Error(ErrorCode::BadBarycentric, "barycentric coordinates must be >= 0 and sum to 1");
  }
  const Tri& T = tri.triangles()[t];
  return lambda[0] * v[T[0]] + lambda[1] * v[T[1]] + lambda[2] * v[T[2]];
}

std::vector<double> edge_transport(const Triangulation& tri, const FrameField& frames) {
  std::vector<double> tau(tri.num_edges());
  for (std::size_t e = 0; e < tri.num_edges(); ++e) {
    const auto [a, b] = tri.edges()[e];
    const Vec3 carried = rotate_between(frames.normal[a], frames.normal[b], frames.e1[a]);
    tau[e] = std::atan2(carried.cross(frames.e1[b]).dot(frames.normal[b]),
                        carried.dot(frames.e1[b]));
  }
  return tau;
}

TangentField canonical_field(const Surface& surface) {
  switch (surface.kind()) {
    case SurfaceKind::Torus:
      return [](const Vec3& p) { return Vec3(-p.y(), p.x(), 0.0).normalized(); };
    case SurfaceKind::GraphBump:
      return [surface](const Vec3& p) {
        const Vec3 n = surface.normal(p);
        return Vec3((Vec3::UnitX() - n.x() * n).normalized());
      };
    case SurfaceKind::Sphere: break;
  }
  throw Error(ErrorCode::HairyBallUnsupported, "the sphere has no non-vanishing tangent field");
}

TangentField longitude_field(const Surface& sphere) {
  if (sphere.kind() != SurfaceKind::Sphere) {
    throw Error(ErrorCode::WrongSurfaceKind, "longitude field is defined on the sphere");
  }
  return [](const Vec3& p) { return Vec3(-p.y(), p.x(), 0.0); };
}

DiscreteField hedgehog_ansatz(const Triangulation& tri, const FrameField& frames,
                              const std::vector<DefectSpec>& defects,
                              const AnsatzOptions& options) {
  const Surface& S = tri.surface();
  int total = 0;
  for (const auto& d : defects) {
    if (d.charge != 1 && d.charge != -1) {
      throw Error(ErrorCode::ChargeMismatch, "only charges +1 and -1 are supported");
    }
    total += d.charge;
  }
  if (tri.is_closed() && total != S.euler_characteristic()) {
    throw Error(ErrorCode::ChargeMismatch, "charges sum to " + std::to_string(total) +
                                               " but the Euler characteristic is " +
                                               std::to_string(S.euler_characteristic()));
  }
  if (defects.empty()) return restrict_smooth(tri, frames, canonical_field(S));

  double sigma = options.sigma;
  if (sigma <= 0.0) {
    sigma = 0.5 * S.injectivity_radius();
    for (std::size_t i = 0; i < defects.size(); ++i)
      for (std::size_t j = i + 1; j < defects.size(); ++j)
        sigma = std::min(sigma, 0.25 * S.geodesic_distance(defects[i].centre, defects[j].centre));
  }

  const std::size_t n = tri.num_vertices();
  const std::size_t K = defects.size();
  DiscreteField out;
  out.theta.assign(n, 0.0);
  std::vector<int> owner(n, -1);  // defect whose disc contains the vertex
  for (std::size_t k = 0; k < K; ++k) {
    const DefectSpec& d = defects[k];
    const TangentBasis basis = S.frame_at(d.centre);
    const std::vector<double> dist = vertex_distances(tri, d.centre);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(dist[i] < sigma)) continue;
      const Vec2 z = S.log_map(d.centre, basis, tri.vertices()[i]);
      Vec2 w = z.norm() > 0.0 ? Vec2(z / z.norm()) : Vec2(1.0, 0.0);
      if (d.charge < 0) w.y() = -w.y();
      const Vec3 dir = S.push_forward(d.centre, basis, z, w);
      out.theta[i] = std::atan2(dir.dot(frames.e2[i]), dir.dot(frames.e1[i]));
      owner[i] = static_cast<int>(k);
    }
  }

  // Harmonic extension: minimise sum_e w_e |psi_b - exp(-i tau_e) psi_a|^2 over free vertices,
  // once per disc (the other discs held at zero) so that the discs can be rotated afterwards.
  using C = std::complex<double>;
  std::vector<int> slot(n, -1);
  int free_count = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (owner[i] < 0) slot[i] = free_count++;
  if (free_count == 0) return out;

  const std::vector<double> tau = edge_transport(tri, frames);
  std::vector<double> weight(tri.num_edges());
  std::vector<Eigen::Triplet<C>> trip;
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(free_count, static_cast<Eigen::Index>(K));
  for (std::size_t e = 0; e < tri.num_edges(); ++e) {
    const double w = weight[e] = std::max(tri.stiffness()[e], 0.0);
    if (w == 0.0) continue;
    const auto [a, b] = tri.edges()[e];
    const C to_b = std::polar(1.0, -tau[e]);  // psi_b ~ to_b psi_a
    const C to_a = std::conj(to_b);
    if (slot[a] >= 0) trip.emplace_back(slot[a], slot[a], w);
    if (slot[b] >= 0) trip.emplace_back(slot[b], slot[b], w);
    if (slot[a] >= 0 && slot[b] >= 0) {
      trip.emplace_back(slot[b], slot[a], -w * to_b);
      trip.emplace_back(slot[a], slot[b], -w * to_a);
    } else if (slot[b] >= 0) {
      rhs(slot[b], owner[a]) += w * to_b * std::polar(1.0, out.theta[a]);
    } else if (slot[a] >= 0) {
      rhs(slot[a], owner[b]) += w * to_a * std::polar(1.0, out.theta[b]);
    }
  }
  Eigen::SparseMatrix<C> A(free_count, free_count);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<C>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorCode::PreconditionViolated,
                "harmonic extension is singular (free region not connected to any disc)");
  }
  const Eigen::MatrixXcd psi = lu.solve(rhs);

  // Energy of sum_k c_k psi^(k) is c^H Q c; pick unit phases c_k by coordinate descent.
  auto value = [&](std::size_t i, std::size_t k) -> C {
    if (slot[i] >= 0) return psi(slot[i], static_cast<Eigen::Index>(k));
    return owner[i] == static_cast<int>(k) ? std::polar(1.0, out.theta[i]) : C(0.0);
  };
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(K, K);
  std::vector<C> diff(K);
  for (std::size_t e = 0; e < tri.num_edges(); ++e) {
    if (weight[e] == 0.0) continue;
    const auto [a, b] = tri.edges()[e];
    const C to_b = std::polar(1.0, -tau[e]);
    for (std::size_t k = 0; k < K; ++k) diff[k] = value(b, k) - to_b * value(a, k);
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t l = 0; l < K; ++l) Q(k, l) += weight[e] * std::conj(diff[k]) * diff[l];
  }
  std::vector<C> c(K, C(1.0));
  for (int sweep = 0; sweep < 200; ++sweep) {
    double moved = 0.0;
    for (std::size_t k = 1; k < K; ++k) {  // the first disc keeps its phase
      C b(0.0);
      for (std::size_t l = 0; l < K; ++l)
        if (l != k) b += Q(k, l) * c[l];
      if (std::abs(b) == 0.0) continue;
      const C next = -b / std::abs(b);
      moved = std::max(moved, std::abs(next - c[k]));
      c[k] = next;
    }
    if (moved < 1e-12) break;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (slot[i] >= 0) {
      C z(0.0);
      for (std::size_t k = 0; k < K; ++k) z += c[k] * psi(slot[i], static_cast<Eigen::Index>(k));
      out.theta[i] = std::arg(z);
    } else {
      out.theta[i] = std::remainder(out.theta[i] + std::arg(c[owner[i]]), 2.0 * kPi);
    }
  }
  return out;
}

InterpolantBounds interpolant_bounds(const Triangulation& tri, const std::vector<Vec3>& v) {
  static constexpr double kSamples[9][3] = {
      {1, 0, 0},     {0, 1, 0},     {0, 0, 1},
      {0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5},
      {1.0 / 3, 1.0 / 3, 1.0 / 3},  {2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}};
  const double eps2 = tri.mesh_size() * tri.mesh_size();
  std::vector<double> energy(tri.num_triangles());
  kernels::parallel::triangle_energies(tri.triangles(), tri.half_cots(), v, energy);
  InterpolantBounds r;
  r.min_norm = std::numeric_limits<double>::infinity();
  for (int t = 0; t < static_cast<int>(tri.num_triangles()); ++t) {
    const double grad2 = 2.0 * energy[t] / tri.triangle_area(t);
    for (const auto& s : kSamples) {
      const double m = interpolant_eval(tri, v, t, Vec3(s[0], s[1], s[2])).norm();
      r.max_norm = std::max(r.max_norm, m);
      r.min_norm = std::min(r.min_norm, m);
      const double defect = (1.0 - m * m) * (1.0 - m * m) / eps2;
      if (grad2 > 0.0) r.gl_constant = std::max(r.gl_constant, defect / grad2);
    }
  }
  return r;
}

void write_field_csv(std::ostream& os, const DiscreteField& field, const std::string& mesh_hash) {
  os << "# mesh " << mesh_hash << "\nvertex_index,theta\n" << std::setprecision(17);
  for (std::size_t i = 0; i < field.theta.size(); ++i) os << i << ',' << field.theta[i] << '\n';
}

DiscreteField read_field_csv(std::istream& is, const std::string& expected_mesh_hash) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# mesh ", 0) != 0) {
    throw Error(ErrorCode::IoError, "field CSV lacks the mesh hash header");
  }
  const std::string hash = line.substr(7);
  if (!expected_mesh_hash.empty() && hash != expected_mesh_hash) {
    throw Error(ErrorCode::IoError, "field CSV belongs to mesh " + hash);
  }
  std::getline(is, line);
  DiscreteField f;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t index = 0;
    char comma = 0;
    double theta = 0.0;
    if (!(row >> index >> comma >> theta) || comma != ',' || index != f.theta.size()) {
      throw Error(ErrorCode::IoError, "malformed field CSV row: " + line);
    }
    f.theta.push_back(theta);
  }
  return f;
}

}  // namespace shellxy
