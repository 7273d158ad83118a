#include "shellxy/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>

#include "shellxy/error.hpp"

namespace shellxy {

namespace {

constexpr double kPi = std::numbers::pi;

void require_kind(const Surface& s, SurfaceKind kind, const char* what) {
  if (s.kind() != kind) throw Error(ErrorCode::WrongSurfaceKind, what);
}

double corner_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u = b - a;
  const Vec3 v = c - a;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

}  // namespace

Triangulation Triangulation::build(const Surface& surface, std::vector<Vec3> vertices,
                                   std::vector<Tri> triangles, std::string generator,
                                   std::vector<LatticeCoord> lattice) {
  Triangulation m(surface);
  m.generator_ = std::move(generator);
  if (!lattice.empty() && lattice.size() != vertices.size()) {
    throw Error(ErrorCode::LengthMismatch, "lattice coordinates do not match vertex count");
  }
  const int nv = static_cast<int>(vertices.size());
  for (const Tri& t : triangles) {
    for (int k : t) {
      if (k < 0 || k >= nv) throw Error(ErrorCode::PreconditionViolated, "vertex index out of range");
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw Error(ErrorCode::DegenerateTriangle, "triangle repeats a vertex");
    }
  }

  m.normals_.resize(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) m.normals_[i] = surface.normal(vertices[i]);

  double eps = 0.0;
  for (const Tri& t : triangles) {
    for (int k = 0; k < 3; ++k)
      eps = std::max(eps, (vertices[t[k]] - vertices[t[(k + 1) % 3]]).norm());
  }
  m.mesh_size_ = eps;

  // The barycentre of a coarse triangle can sit far from the surface, so orientation is
  // judged against the averaged vertex normals.
  for (Tri& t : triangles) {
    const Vec3 n = m.normals_[t[0]] + m.normals_[t[1]] + m.normals_[t[2]];
    const Vec3 c = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
    if (!(0.5 * c.norm() > 1e-14 * eps * eps)) {
      throw Error(ErrorCode::DegenerateTriangle, "triangle area below 1e-14 eps^2");
    }
    if (c.dot(n) < 0.0) std::swap(t[1], t[2]);
  }

  struct Side {
    int i, j, t, corner;
  };
  std::vector<Side> sides;
  sides.reserve(3 * triangles.size());
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = triangles[t][(k + 1) % 3];
      const int b = triangles[t][(k + 2) % 3];
      sides.push_back({std::min(a, b), std::max(a, b), t, k});
    }
  }
  std::sort(sides.begin(), sides.end(), [](const Side& x, const Side& y) {
    return std::tie(x.i, x.j, x.t) < std::tie(y.i, y.j, y.t);
  });

  m.triangle_edges_.assign(triangles.size(), Tri{-1, -1, -1});
  m.closed_ = true;
  for (std::size_t s = 0; s < sides.size();) {
    std::size_t r = s;
    while (r < sides.size() && sides[r].i == sides[s].i && sides[r].j == sides[s].j) ++r;
    if (r - s > 2) {
      throw Error(ErrorCode::NonManifold, "edge (" + std::to_string(sides[s].i) + ", " +
                                              std::to_string(sides[s].j) + ") has " +
                                              std::to_string(r - s) + " triangles");
    }
    const int e = static_cast<int>(m.edges_.size());
    m.edges_.push_back({sides[s].i, sides[s].j});
    Edge et{-1, -1};
    for (std::size_t q = s; q < r; ++q) {
      et[q - s] = sides[q].t;
      m.triangle_edges_[sides[q].t][sides[q].corner] = e;
    }
    if (r - s == 1) m.closed_ = false;
    m.edge_triangles_.push_back(et);
    s = r;
  }

  auto& adj = m.adjacency_;
  adj.offsets.assign(vertices.size() + 1, 0);
  for (const Edge& e : m.edges_) {
    ++adj.offsets[e[0] + 1];
    ++adj.offsets[e[1] + 1];
  }
  for (std::size_t i = 0; i < vertices.size(); ++i) adj.offsets[i + 1] += adj.offsets[i];
  adj.neighbour.resize(adj.offsets.back());
  adj.edge.resize(adj.offsets.back());
  {
    std::vector<std::pair<int, int>> slots(adj.offsets.back());
    std::vector<int> fill(adj.offsets.begin(), adj.offsets.end() - 1);
    for (int e = 0; e < static_cast<int>(m.edges_.size()); ++e) {
      const auto [a, b] = m.edges_[e];
      slots[fill[a]++] = {b, e};
      slots[fill[b]++] = {a, e};
    }
    for (std::size_t i = 0; i < vertices.size(); ++i)
      std::sort(slots.begin() + adj.offsets[i], slots.begin() + adj.offsets[i + 1]);
    for (std::size_t k = 0; k < slots.size(); ++k) {
      adj.neighbour[k] = slots[k].first;
      adj.edge[k] = slots[k].second;
    }
  }

  m.vertices_ = std::move(vertices);
  m.triangles_ = std::move(triangles);
  m.lattice_ = std::move(lattice);
  m.half_cots_ = kernels::parallel::triangle_half_cots(m.vertices_, m.triangles_);
  m.kappa_ = kernels::parallel::edge_stiffness(m.edge_triangles_, m.triangle_edges_, m.half_cots_);
  return m;
}

int Triangulation::euler_characteristic() const {
  return static_cast<int>(num_vertices()) - static_cast<int>(num_edges()) +
         static_cast<int>(num_triangles());
}

int Triangulation::edge_index(int i, int j) const {
  if (i < 0 || j < 0 || i >= static_cast<int>(num_vertices()) ||
      j >= static_cast<int>(num_vertices())) {
    return -1;
  }
  const auto first = adjacency_.neighbour.begin() + adjacency_.offsets[i];
  const auto last = adjacency_.neighbour.begin() + adjacency_.offsets[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return adjacency_.edge[it - adjacency_.neighbour.begin()];
}

double Triangulation::kappa(int i, int j) const {
  const int e = edge_index(i, j);
  return e < 0 ? 0.0 : kappa_[e];
}

double Triangulation::triangle_area(int t) const {
  const Tri& T = triangles_[t];
  return 0.5 * (vertices_[T[1]] - vertices_[T[0]]).cross(vertices_[T[2]] - vertices_[T[0]]).norm();
}

double Triangulation::triangle_diameter(int t) const {
  const Tri& T = triangles_[t];
  double d = 0.0;
  for (int k = 0; k < 3; ++k) d = std::max(d, (vertices_[T[k]] - vertices_[T[(k + 1) % 3]]).norm());
  return d;
}

Vec3 Triangulation::barycentre(int t) const {
  const Tri& T = triangles_[t];
  return (vertices_[T[0]] + vertices_[T[1]] + vertices_[T[2]]) / 3.0;
}

std::vector<int> Triangulation::boundary_vertices() const {
  std::vector<char> on(num_vertices(), 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edge_triangles_[e][1] < 0) on[edges_[e][0]] = on[edges_[e][1]] = 1;
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < on.size(); ++i)
    if (on[i]) out.push_back(static_cast<int>(i));
  return out;
}

Triangulation Triangulation::submesh(std::span<const int> triangle_ids,
                                     std::vector<int>* vertex_map) const {
  std::vector<int> remap(num_vertices(), -1);
  for (int t : triangle_ids)
    for (int k : triangles_[t]) remap[k] = 0;
  std::vector<int> old_of;
  std::vector<Vec3> verts;
  std::vector<LatticeCoord> lat;
  for (std::size_t i = 0; i < remap.size(); ++i) {
    if (remap[i] < 0) continue;
    remap[i] = static_cast<int>(old_of.size());
    old_of.push_back(static_cast<int>(i));
    verts.push_back(vertices_[i]);
    if (!lattice_.empty()) lat.push_back(lattice_[i]);
  }
  std::vector<Tri> tris;
  tris.reserve(triangle_ids.size());
  for (int t : triangle_ids) {
    const Tri& T = triangles_[t];
    tris.push_back({remap[T[0]], remap[T[1]], remap[T[2]]});
  }
  if (vertex_map) *vertex_map = old_of;
  return build(surface_, std::move(verts), std::move(tris), generator_, std::move(lat));
}

// ---------------------------------------------------------------------------------------------
// Generators

Triangulation gen_icosphere(const Surface& sphere, int level) {
  require_kind(sphere, SurfaceKind::Sphere, "icosphere needs a sphere");
  if (level < 0) throw Error(ErrorCode::ResolutionTooLow, "icosphere level must be >= 0");
  const double R = sphere.radius();
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                         {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                         {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (Vec3& p : v) p = R * p.normalized();
  std::vector<Tri> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7}, {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto [it, fresh] = mid.try_emplace({key.first, key.second}, static_cast<int>(v.size()));
      if (fresh) v.push_back(R * (v[a] + v[b]).normalized());
      return it->second;
    };
    std::vector<Tri> g;
    g.reserve(4 * f.size());
    for (const Tri& t : f) {
      const int ab = midpoint(t[0], t[1]);
      const int bc = midpoint(t[1], t[2]);
      const int ca = midpoint(t[2], t[0]);
      g.push_back({t[0], ab, ca});
      g.push_back({t[1], bc, ab});
      g.push_back({t[2], ca, bc});
      g.push_back({ab, bc, ca});
    }
    f = std::move(g);
  }
  return Triangulation::build(sphere, std::move(v), std::move(f), "icosphere");
}

Triangulation gen_cubed_sphere(const Surface& sphere, int n) {
  require_kind(sphere, SurfaceKind::Sphere, "cubed sphere needs a sphere");
  if (n < 1) throw Error(ErrorCode::ResolutionTooLow, "cubed sphere needs n >= 1");
  const double R = sphere.radius();
  std::map<std::array<int, 3>, int> index;
  std::vector<Vec3> verts;
  std::vector<LatticeCoord> lattice;
  std::vector<Tri> tris;
  int face = 0;
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign : {1, -1}) {
      const int ua = (axis + 1) % 3;
      const int va = (axis + 2) % 3;
      std::vector<int> id((n + 1) * (n + 1));
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
          std::array<int, 3> c{};
          c[axis] = sign * n;
          c[ua] = 2 * i - n;
          c[va] = 2 * j - n;
          auto [it, fresh] = index.try_emplace(c, static_cast<int>(verts.size()));
          if (fresh) {
            verts.push_back(R * Vec3(c[0], c[1], c[2]).normalized());
            lattice.push_back({face, i, j});
          }
          id[i * (n + 1) + j] = it->second;
        }
      }
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const int p00 = id[i * (n + 1) + j];
          const int p10 = id[(i + 1) * (n + 1) + j];
          const int p11 = id[(i + 1) * (n + 1) + j + 1];
          const int p01 = id[i * (n + 1) + j + 1];
          const double d0 = (verts[p00] - verts[p11]).norm();
          const double d1 = (verts[p10] - verts[p01]).norm();
          if (d0 <= d1 * (1.0 + 1e-12)) {
            tris.push_back({p00, p10, p11});
            tris.push_back({p00, p11, p01});
          } else {
            tris.push_back({p00, p10, p01});
            tris.push_back({p10, p11, p01});
          }
        }
      }
      ++face;
    }
  }
  return Triangulation::build(sphere, std::move(verts), std::move(tris), "cubed_sphere",
                              std::move(lattice));
}

Triangulation gen_torus_mesh(const Surface& torus, int n_major, int n_minor) {
  require_kind(torus, SurfaceKind::Torus, "torus mesh needs a torus");
  if (n_major < 3 || n_minor < 3) {
    throw Error(ErrorCode::ResolutionTooLow, "torus mesh needs n_major, n_minor >= 3");
  }
  std::vector<Vec3> verts;
  std::vector<LatticeCoord> lattice;
  for (int i = 0; i < n_major; ++i) {
    for (int j = 0; j < n_minor; ++j) {
      verts.push_back(torus.chart(2.0 * kPi * i / n_major, 2.0 * kPi * j / n_minor));
      lattice.push_back({0, i, j});
    }
  }
  auto id = [&](int i, int j) { return (i % n_major) * n_minor + (j % n_minor); };
  std::vector<Tri> tris;
  for (int i = 0; i < n_major; ++i) {
    for (int j = 0; j < n_minor; ++j) {
      const int p00 = id(i, j), p10 = id(i + 1, j), p11 = id(i + 1, j + 1), p01 = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({p00, p10, p11});
        tris.push_back({p00, p11, p01});
      } else {
        tris.push_back({p00, p10, p01});
        tris.push_back({p10, p11, p01});
      }
    }
  }
  return Triangulation::build(torus, std::move(verts), std::move(tris), "torus",
                              std::move(lattice));
}

Triangulation gen_uv_sphere(const Surface& sphere, int n_lon, int n_lat) {
  require_kind(sphere, SurfaceKind::Sphere, "uv sphere needs a sphere");
  if (n_lon < 3 || n_lat < 2) throw Error(ErrorCode::ResolutionTooLow, "uv sphere too coarse");
  std::vector<Vec3> verts;
  verts.push_back(sphere.chart(0.0, 0.0));
  for (int j = 1; j < n_lat; ++j)
    for (int i = 0; i < n_lon; ++i)
      verts.push_back(sphere.chart(2.0 * kPi * i / n_lon, kPi * j / n_lat));
  verts.push_back(sphere.chart(0.0, kPi));
  const int south = static_cast<int>(verts.size()) - 1;
  auto id = [&](int ring, int i) { return 1 + (ring - 1) * n_lon + (i % n_lon); };
  std::vector<Tri> tris;
  for (int i = 0; i < n_lon; ++i) {
    tris.push_back({0, id(1, i), id(1, i + 1)});
    tris.push_back({south, id(n_lat - 1, i + 1), id(n_lat - 1, i)});
  }
  for (int j = 1; j + 1 < n_lat; ++j) {
    for (int i = 0; i < n_lon; ++i) {
      tris.push_back({id(j, i), id(j + 1, i), id(j + 1, i + 1)});
      tris.push_back({id(j, i), id(j + 1, i + 1), id(j, i + 1)});
    }
  }
  return Triangulation::build(sphere, std::move(verts), std::move(tris), "uv_sphere");
}

Triangulation gen_planar_grid(const Surface& plane, int n, double half_width) {
  if (!plane.is_flat()) throw Error(ErrorCode::WrongSurfaceKind, "planar grid needs a flat surface");
  if (n < 1) throw Error(ErrorCode::ResolutionTooLow, "planar grid needs n >= 1");
  std::vector<Vec3> verts;
  std::vector<LatticeCoord> lattice;
  const double h = 2.0 * half_width / n;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      verts.emplace_back(-half_width + h * i, -half_width + h * j, 0.0);
      lattice.push_back({0, i, j});
    }
  }
  auto id = [&](int i, int j) { return i * (n + 1) + j; };
  std::vector<Tri> tris;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Triangulation::build(plane, std::move(verts), std::move(tris), "planar_grid",
                              std::move(lattice));
}

Triangulation gen_polar_annulus(const Surface& surface, const Vec3& centre, double r_in,
                                double r_out, int n_theta) {
  if (n_theta < 8 || !(r_in > 0.0) || !(r_out > r_in)) {
    throw Error(ErrorCode::ResolutionTooLow, "polar annulus needs n_theta >= 8, 0 < r_in < r_out");
  }
  // Radial step ~ (sqrt(3)/2) x arc step keeps the triangles close to equilateral.
  const double target = std::log1p(std::sqrt(3.0) * kPi / n_theta);
  const int rings = std::max(1, static_cast<int>(std::lround(std::log(r_out / r_in) / target)));
  const double q = std::pow(r_out / r_in, 1.0 / rings);
  const TangentBasis basis = surface.frame_at(centre);
  std::vector<Vec3> verts;
  for (int k = 0; k <= rings; ++k) {
    const double r = k == rings ? r_out : r_in * std::pow(q, k);
    for (int j = 0; j < n_theta; ++j) {
      const double phi = 2.0 * kPi * (j + 0.5 * (k % 2)) / n_theta;
      verts.push_back(surface.exp_map(centre, basis, r * Vec2(std::cos(phi), std::sin(phi))));
    }
  }
  auto id = [&](int k, int j) { return k * n_theta + (j % n_theta); };
  std::vector<Tri> tris;
  for (int k = 0; k < rings; ++k) {
    for (int j = 0; j < n_theta; ++j) {
      if (k % 2 == 0) {
        tris.push_back({id(k, j), id(k, j + 1), id(k + 1, j)});
        tris.push_back({id(k + 1, j), id(k, j + 1), id(k + 1, j + 1)});
      } else {
        tris.push_back({id(k, j), id(k, j + 1), id(k + 1, j + 1)});
        tris.push_back({id(k + 1, j), id(k, j), id(k + 1, j + 1)});
      }
    }
  }
  return Triangulation::build(surface, std::move(verts), std::move(tris), "polar_annulus");
}

std::vector<StiffnessEntry> assemble_stiffness(const Triangulation& tri) {
  std::vector<StiffnessEntry> out;
  out.reserve(2 * tri.num_edges());
  for (std::size_t e = 0; e < tri.num_edges(); ++e) {
    const auto [i, j] = tri.edges()[e];
    out.push_back({i, j, tri.stiffness()[e]});
    out.push_back({j, i, tri.stiffness()[e]});
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Hypotheses

double h4_displacement(const Triangulation& tri, const Vec3& base, double window) {
  const auto& lat = tri.lattice();
  if (lat.empty()) {
    throw Error(ErrorCode::H4Unavailable,
                "generator '" + tri.generator() + "' has no canonical lattice correspondence");
  }
  const auto& X = tri.vertices();
  int b = 0;
  for (int i = 1; i < static_cast<int>(X.size()); ++i)
    if ((X[i] - base).norm() < (X[b] - base).norm()) b = i;

  const int chart = lat[b].chart;
  // Periodic lattices (torus) wrap; extents are read off the coordinates themselves.
  int period_a = 0, period_b = 0;
  if (tri.is_closed() && tri.generator() == "torus") {
    for (const auto& c : lat) {
      period_a = std::max(period_a, c.a + 1);
      period_b = std::max(period_b, c.b + 1);
    }
  }
  auto wrap = [](int d, int p) {
    if (p == 0) return d;
    d %= p;
    if (d > p / 2) d -= p;
    if (d < -p / 2) d += p;
    return d;
  };
  std::map<std::pair<int, int>, int> at;
  for (int i = 0; i < static_cast<int>(lat.size()); ++i) {
    if (lat[i].chart == chart) {
      at[{wrap(lat[i].a - lat[b].a, period_a), wrap(lat[i].b - lat[b].b, period_b)}] = i;
    }
  }
  const double eps = tri.mesh_size();
  const TangentBasis basis = tri.surface().frame_at(X[b]);
  auto z = [&](int i) { return Vec2(tri.surface().log_map(X[b], basis, X[i]) / eps); };
  auto find = [&](int da, int db) {
    auto it = at.find({da, db});
    if (it == at.end()) {
      throw Error(ErrorCode::H4Unavailable, "base vertex has no full lattice neighbourhood");
    }
    return it->second;
  };
  Eigen::Matrix2d L;
  L.col(0) = 0.5 * (z(find(1, 0)) - z(find(-1, 0)));
  L.col(1) = 0.5 * (z(find(0, 1)) - z(find(0, -1)));

  double worst = 0.0;
  for (const auto& [d, i] : at) {
    // Window by chord distance: the projection chart folds far parts of the surface onto it.
    if ((X[i] - X[b]).norm() > window * eps) continue;
    worst = std::max(worst, (z(i) - L * Vec2(d.first, d.second)).norm());
  }
  return worst * std::abs(std::log(eps));
}

HypothesisReport validate_hypotheses(const Triangulation& tri, const HypothesisThresholds& th,
                                     const std::optional<Vec3>& h4_base) {
  HypothesisReport r;
  const auto& X = tri.vertices();
  const auto& T = tri.triangles();
  const double eps = tri.mesh_size();

  double min_angle = kPi;
  double min_diam = std::numeric_limits<double>::infinity();
  for (int t = 0; t < static_cast<int>(T.size()); ++t) {
    for (int k = 0; k < 3; ++k) {
      min_angle = std::min(min_angle, corner_angle(X[T[t][k]], X[T[t][(k + 1) % 3]],
                                                   X[T[t][(k + 2) % 3]]));
    }
    min_diam = std::min(min_diam, tri.triangle_diameter(t));
  }
  r.h1.min_angle = min_angle;
  r.h1.min_diameter = min_diam;
  r.h1.lambda_estimate = std::max(eps / min_diam, 1.0 / min_angle);
  r.h1.pass = r.h1.lambda_estimate <= th.lambda;

  const auto& kappa = tri.stiffness();
  r.h2.min_kappa = kappa.empty() ? 0.0 : *std::min_element(kappa.begin(), kappa.end());
  r.h2.pass = r.h2.min_kappa >= -th.kappa_tol;

  // Chord ratios between 9 sample points per triangle and their projections.
  static constexpr double kSamples[9][3] = {
      {1, 0, 0},     {0, 1, 0},     {0, 0, 1},
      {0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5},
      {1.0 / 3, 1.0 / 3, 1.0 / 3},  {2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}};
  const Surface& S = tri.surface();
  double lip = 0.0, lip_inv = 0.0;
  int outside = 0;
  const auto nt = static_cast<std::ptrdiff_t>(T.size());
#pragma omp parallel for schedule(static) reduction(max : lip, lip_inv, outside)
  for (std::ptrdiff_t t = 0; t < nt; ++t) {
    Vec3 x[9], p[9];
    try {
      for (int s = 0; s < 9; ++s) {
        x[s] = kSamples[s][0] * X[T[t][0]] + kSamples[s][1] * X[T[t][1]] +
               kSamples[s][2] * X[T[t][2]];
        p[s] = S.project(x[s]);
      }
    } catch (const Error&) {
      outside = 1;  // polyhedron leaves the tubular neighbourhood: P is not even defined
      continue;
    }
    for (int a = 0; a < 9; ++a) {
      for (int b = a + 1; b < 9; ++b) {
        const double ratio = (p[a] - p[b]).norm() / (x[a] - x[b]).norm();
        lip = std::max(lip, ratio);
        lip_inv = std::max(lip_inv, 1.0 / ratio);
      }
    }
  }
  if (outside) lip = lip_inv = std::numeric_limits<double>::infinity();
  r.h3.lip_p = lip;
  r.h3.lip_p_inv = lip_inv;
  r.h3.pass = lip + lip_inv <= th.lipschitz;

  if (!h4_base) {
    r.h4.reason = "no family context given";
  } else if (tri.lattice().empty()) {
    r.h4.reason = "generator '" + tri.generator() +
                  "' has no canonical correspondence (not self-similar under refinement)";
  } else {
    try {
      r.h4.displacement_times_logeps = h4_displacement(tri, *h4_base, th.h4_window);
      r.h4.evaluated = true;
      r.h4.pass = r.h4.displacement_times_logeps <= th.h4;
    } catch (const Error& e) {
      r.h4.reason = e.what();
    }
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// Distances and balls

std::vector<double> vertex_distances(const Triangulation& tri, const Vec3& centre) {
  const Surface& S = tri.surface();
  const auto& X = tri.vertices();
  std::vector<double> d(X.size(), std::numeric_limits<double>::infinity());
  if (S.kind() == SurfaceKind::Sphere || S.is_flat()) {
    for (std::size_t i = 0; i < X.size(); ++i) d[i] = S.geodesic_distance(centre, X[i]);
    return d;
  }
  int nearest = 0;
  for (int i = 1; i < static_cast<int>(X.size()); ++i)
    if ((X[i] - centre).norm() < (X[nearest] - centre).norm()) nearest = i;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const auto& adj = tri.adjacency();
  auto seed = [&](int i) {
    const double c = (X[i] - centre).norm();
    if (c < d[i]) {
      d[i] = c;
      heap.emplace(c, i);
    }
  };
  seed(nearest);
  for (int k = adj.offsets[nearest]; k < adj.offsets[nearest + 1]; ++k) seed(adj.neighbour[k]);
  while (!heap.empty()) {
    auto [di, i] = heap.top();
    heap.pop();
    if (di > d[i]) continue;
    for (int k = adj.offsets[i]; k < adj.offsets[i + 1]; ++k) {
      const int j = adj.neighbour[k];
      const double nd = di + (X[j] - X[i]).norm();
      if (nd < d[j]) {
        d[j] = nd;
        heap.emplace(nd, j);
      }
    }
  }
  return d;
}

DiscreteBall discrete_ball(const Triangulation& tri, const Vec3& centre, double delta) {
  const std::vector<double> dist = vertex_distances(tri, centre);
  DiscreteBall ball;
  std::vector<char> inside(tri.num_triangles(), 0);
  for (int t = 0; t < static_cast<int>(tri.num_triangles()); ++t) {
    const Tri& T = tri.triangles()[t];
    if (dist[T[0]] < delta && dist[T[1]] < delta && dist[T[2]] < delta) {
      inside[t] = 1;
      ball.triangles.push_back(t);
    }
  }
  if (ball.triangles.size() < 3) {
    throw Error(ErrorCode::BallTooSmall, "ball of radius " + std::to_string(delta) + " contains " +
                                             std::to_string(ball.triangles.size()) + " triangles");
  }
  std::vector<char> on(tri.num_vertices(), 0);
  for (std::size_t e = 0; e < tri.num_edges(); ++e) {
    const auto [t0, t1] = tri.edge_triangles()[e];
    const int count = (t0 >= 0 && inside[t0]) + (t1 >= 0 && inside[t1]);
    if (count == 1) on[tri.edges()[e][0]] = on[tri.edges()[e][1]] = 1;
  }
  for (std::size_t i = 0; i < on.size(); ++i)
    if (on[i]) ball.boundary.push_back(static_cast<int>(i));
  return ball;
}

// ---------------------------------------------------------------------------------------------
// OFF

void write_off(std::ostream& os, const Triangulation& tri) {
  os << "OFF\n" << tri.num_vertices() << ' ' << tri.num_triangles() << " 0\n";
  os << std::setprecision(17);
  for (const Vec3& p : tri.vertices()) os << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const Tri& t : tri.triangles()) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

Triangulation read_off(std::istream& is, const Surface& surface) {
  std::string magic;
  is >> magic;
  if (magic != "OFF") throw Error(ErrorCode::IoError, "missing OFF header");
  std::size_t nv = 0, nf = 0, ne = 0;
  if (!(is >> nv >> nf >> ne)) throw Error(ErrorCode::IoError, "bad OFF counts");
  std::vector<Vec3> verts(nv);
  for (auto& p : verts)
    if (!(is >> p.x() >> p.y() >> p.z())) throw Error(ErrorCode::IoError, "truncated OFF vertices");
  std::vector<Tri> tris(nf);
  for (auto& t : tris) {
    int k = 0;
    if (!(is >> k >> t[0] >> t[1] >> t[2]) || k != 3) {
      throw Error(ErrorCode::IoError, "OFF faces must be triangles");
    }
  }
  return Triangulation::build(surface, std::move(verts), std::move(tris), "off");
}

}  // namespace shellxy
