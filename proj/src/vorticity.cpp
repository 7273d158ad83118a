#include "shellxy/vorticity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "shellxy/error.hpp"

namespace shellxy {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double x) {
  x = std::remainder(x, kTwoPi);  // [-pi, pi]
  return x == -std::numbers::pi ? std::numbers::pi : x;
}

// Angle change along every edge (a -> b, a < b), measured in a common frame.
std::vector<double> edge_increments(const Triangulation& tri, const FrameField& frames,
                                    const DiscreteField& field) {
  if (field.theta.size() != tri.num_vertices() || frames.size() != tri.num_vertices()) {
    throw Error(ErrorCode::LengthMismatch, "field, frames and mesh have different lengths");
  }
  std::vector<double> d = edge_transport(tri, frames);
  for (std::size_t e = 0; e < d.size(); ++e) {
    const auto [a, b] = tri.edges()[e];
    d[e] = wrap_angle(field.theta[b] - field.theta[a] + d[e]);
  }
  return d;
}

double triangle_turns(const Triangulation& tri, const std::vector<double>& inc, int t) {
  const Tri& T = tri.triangles()[t];
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int a = T[(k + 1) % 3];
    const int b = T[(k + 2) % 3];
    const double d = inc[tri.triangle_edges()[t][k]];
    s += a < b ? d : -d;
  }
  return s / kTwoPi;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<double> mu_hat(const Triangulation& tri, const std::vector<Vec3>& v) {
  if (v.size() != tri.num_vertices()) {
    throw Error(ErrorCode::LengthMismatch, "field and mesh have different lengths");
  }
  std::vector<double> out(tri.num_triangles());
  kernels::parallel::mu_hat(tri.triangles(), tri.normals(), v, out);
  return out;
}

int Windings::total() const { return std::accumulate(winding.begin(), winding.end(), 0); }

std::size_t Windings::ambiguous_count() const {
  return static_cast<std::size_t>(std::count(ambiguous.begin(), ambiguous.end(), 1));
}

Windings windings(const Triangulation& tri, const FrameField& frames, const DiscreteField& field) {
  const std::vector<double> inc = edge_increments(tri, frames, field);
  Windings w;
  const std::size_t n = tri.num_triangles();
  w.winding.resize(n);
  w.residual.resize(n);
  w.ambiguous.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double turns = triangle_turns(tri, inc, static_cast<int>(t));
    w.winding[t] = static_cast<int>(std::lround(turns));
    w.residual[t] = std::abs(turns - w.winding[t]);
    w.ambiguous[t] = w.residual[t] >= kWindingResidual;
  }
  return w;
}

int triangle_winding(const Triangulation& tri, const FrameField& frames,
                     const DiscreteField& field, int t) {
  if (field.theta.size() != tri.num_vertices()) {
    throw Error(ErrorCode::LengthMismatch, "field and mesh have different lengths");
  }
  const std::vector<double> tau = edge_transport(tri, frames);
  const Tri& T = tri.triangles()[t];
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int a = T[(k + 1) % 3];
    const int b = T[(k + 2) % 3];
    const double tr = tau[tri.triangle_edges()[t][k]];
    s += wrap_angle(field.theta[b] - field.theta[a] + (a < b ? tr : -tr));
  }
  const double turns = s / kTwoPi;
  const long w = std::lround(turns);
  if (std::abs(turns - w) >= kWindingResidual) {
    throw Error(ErrorCode::AmbiguousWinding,
                "triangle " + std::to_string(t) + " residual " + std::to_string(turns - w));
  }
  return static_cast<int>(w);
}

DefectSet detect_defects(const Triangulation& tri, const FrameField& frames,
                         const DiscreteField& field, double merge_radius) {
  const Windings w = windings(tri, frames, field);
  const std::size_t n = tri.num_triangles();
  if (w.ambiguous_count() * 100 > n) {
    throw Error(ErrorCode::AmbiguousWinding,
                std::to_string(w.ambiguous_count()) + " of " + std::to_string(n) +
                    " triangles have ambiguous winding; the field is under-resolved");
  }
  if (merge_radius <= 0.0) merge_radius = 3.0 * tri.mesh_size();

  std::vector<int> marked;
  for (std::size_t t = 0; t < n; ++t)
    if (w.winding[t] != 0 || w.ambiguous[t]) marked.push_back(static_cast<int>(t));
  std::vector<Vec3> centre(marked.size());
  for (std::size_t k = 0; k < marked.size(); ++k) centre[k] = tri.barycentre(marked[k]);

  UnionFind uf(marked.size());
  for (std::size_t a = 0; a < marked.size(); ++a)
    for (std::size_t b = a + 1; b < marked.size(); ++b)
      if ((centre[a] - centre[b]).norm() <= merge_radius) uf.unite(static_cast<int>(a), static_cast<int>(b));

  DefectSet out;
  std::vector<int> cluster_of(marked.size(), -1);
  for (std::size_t k = 0; k < marked.size(); ++k) {
    const int root = uf.find(static_cast<int>(k));
    if (cluster_of[root] < 0) {
      cluster_of[root] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[cluster_of[root]].triangles.push_back(marked[k]);
  }
  for (Defect& d : out) {
    double area = 0.0;
    Vec3 c = Vec3::Zero();
    bool resolved = false;
    for (int t : d.triangles) {
      d.charge += w.winding[t];
      resolved = resolved || !w.ambiguous[t];
      const double a = tri.triangle_area(t);
      area += a;
      c += a * tri.barycentre(t);
    }
    if (!resolved) {
      throw Error(ErrorCode::UnresolvedRegion,
                  "a cluster of " + std::to_string(d.triangles.size()) +
                      " triangles has only ambiguous windings");
    }
    d.position = tri.surface().project(c / area);
    for (int t : d.triangles)
      for (int i : tri.triangles()[t])
        d.core_radius = std::max(d.core_radius, (tri.vertices()[i] - d.position).norm());
  }
  return out;
}

VorticityReport vorticity_report(const Triangulation& tri, const FrameField& frames,
                                 const DiscreteField& field, double merge_radius) {
  VorticityReport r;
  r.mu_hat = mu_hat(tri, realize(field, frames));
  r.windings = windings(tri, frames, field);
  r.defects = detect_defects(tri, frames, field, merge_radius);
  return r;
}

double region_vorticity_check(const Triangulation& tri, const FrameField& frames,
                              const DiscreteField& field, const std::vector<int>& region,
                              const DefectSet& defects_in_region) {
  const double eps = tri.mesh_size();
  std::vector<char> in(tri.num_triangles(), 0);
  for (int t : region) in[t] = 1;
  std::vector<int> boundary;
  for (std::size_t e = 0; e < tri.num_edges(); ++e) {
    const auto [t0, t1] = tri.edge_triangles()[e];
    const int count = (t0 >= 0 && in[t0]) + (t1 >= 0 && in[t1]);
    if (count == 1) {
      boundary.push_back(tri.edges()[e][0]);
      boundary.push_back(tri.edges()[e][1]);
    }
  }
  int charge = 0;
  for (const Defect& d : defects_in_region) {
    for (int i : boundary) {
      if ((tri.vertices()[i] - d.position).norm() < 3.0 * eps) {
        throw Error(ErrorCode::CoreOverlap, "region boundary passes within 3 eps of a defect");
      }
    }
    charge += d.charge;
  }
  const std::vector<double> mu = mu_hat(tri, realize(field, frames));
  const Surface& S = tri.surface();
  double sum_mu = 0.0, sum_g = 0.0;
  for (int t : region) {
    sum_mu += mu[t];
    sum_g += S.gauss_curvature(S.project(tri.barycentre(t))) * tri.triangle_area(t);
  }
  return std::abs(sum_mu - (kTwoPi * charge - sum_g));
}

std::vector<char> core_indicator(const Triangulation& tri, const std::vector<Vec3>& v) {
  const double eps = tri.mesh_size();
  const double t_eps = eps * std::log(eps) * std::log(eps);
  std::vector<char> out(tri.num_triangles());
  const Vec3 third = Vec3::Constant(1.0 / 3.0);
  for (int t = 0; t < static_cast<int>(tri.num_triangles()); ++t)
    out[t] = interpolant_eval(tri, v, t, third).norm() < t_eps;
  return out;
}

}  // namespace shellxy
