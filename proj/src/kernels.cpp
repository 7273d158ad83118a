#include "shellxy/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shellxy::kernels {

namespace {

HalfCots corner_half_cots(const Vec3& a, const Vec3& b, const Vec3& c) {
  auto half_cot = [](const Vec3& p, const Vec3& q) { return 0.5 * p.dot(q) / p.cross(q).norm(); };
  return {half_cot(b - a, c - a), half_cot(c - b, a - b), half_cot(a - c, b - c)};
}

double edge_kappa(const Edge& tris, std::span<const Tri> triangle_edges,
                  std::span<const HalfCots> half_cots, int e) {
  double k = 0.0;
  for (int t : tris) {
    if (t < 0) continue;
    for (int c = 0; c < 3; ++c)
      if (triangle_edges[t][c] == e) k += half_cots[t][c];
  }
  return k;
}

double triangle_energy(const Tri& t, const HalfCots& hc, std::span<const Vec3> v) {
  // Corner c is opposite the edge (t[c+1], t[c+2]).
  double s = 0.0;
  for (int c = 0; c < 3; ++c) s += hc[c] * (v[t[(c + 1) % 3]] - v[t[(c + 2) % 3]]).squaredNorm();
  return 0.5 * s;
}

double edge_change(const Edge& e, std::span<const Vec3> v, std::span<const Vec3> w) {
  const Vec3 dw = w[e[0]] - w[e[1]];
  return dw.dot(2.0 * (v[e[0]] - v[e[1]]) + dw);
}

double triangle_mu(const Tri& t, std::span<const Vec3> n, std::span<const Vec3> v) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int a = t[k];
    const int b = t[(k + 1) % 3];
    s += 0.5 * (n[a] + n[b]).dot(v[a].cross(v[b]));
  }
  return s;
}

}  // namespace

namespace serial {

std::vector<HalfCots> triangle_half_cots(std::span<const Vec3> vertices,
                                         std::span<const Tri> triangles) {
  std::vector<HalfCots> out(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const Tri& T = triangles[t];
    out[t] = corner_half_cots(vertices[T[0]], vertices[T[1]], vertices[T[2]]);
  }
  return out;
}

std::vector<double> edge_stiffness(std::span<const Edge> edge_triangles,
                                   std::span<const Tri> triangle_edges,
                                   std::span<const HalfCots> half_cots) {
  std::vector<double> kappa(edge_triangles.size());
  for (std::size_t e = 0; e < edge_triangles.size(); ++e)
    kappa[e] = edge_kappa(edge_triangles[e], triangle_edges, half_cots, static_cast<int>(e));
  return kappa;
}

double xy_energy(std::span<const Edge> edges, std::span<const double> kappa,
                 std::span<const Vec3> v) {
  double s = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e)
    s += kappa[e] * (v[edges[e][0]] - v[edges[e][1]]).squaredNorm();
  return 0.5 * s;
}

double xy_energy_change(std::span<const Edge> edges, std::span<const double> kappa,
                        std::span<const Vec3> v, std::span<const Vec3> w) {
  double s = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) s += kappa[e] * edge_change(edges[e], v, w);
  return 0.5 * s;
}

void xy_gradient(const Adjacency& adj, std::span<const double> kappa, std::span<const Vec3> v,
                 std::span<const Vec3> dv, std::span<double> out) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    double g = 0.0;
    for (int k = adj.offsets[i]; k < adj.offsets[i + 1]; ++k)
      g += kappa[adj.edge[k]] * (v[i] - v[adj.neighbour[k]]).dot(dv[i]);
    out[i] = g;
  }
}

void triangle_energies(std::span<const Tri> triangles, std::span<const HalfCots> half_cots,
                       std::span<const Vec3> v, std::span<double> out) {
  for (std::size_t t = 0; t < triangles.size(); ++t)
    out[t] = triangle_energy(triangles[t], half_cots[t], v);
}

void mu_hat(std::span<const Tri> triangles, std::span<const Vec3> normals,
            std::span<const Vec3> v, std::span<double> out) {
  for (std::size_t t = 0; t < triangles.size(); ++t) out[t] = triangle_mu(triangles[t], normals, v);
}

void realize(std::span<const double> theta, std::span<const Vec3> e1, std::span<const Vec3> e2,
             std::span<Vec3> v, std::span<Vec3> dv) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double c = std::cos(theta[i]);
    const double s = std::sin(theta[i]);
    v[i] = c * e1[i] + s * e2[i];
    dv[i] = -s * e1[i] + c * e2[i];
  }
}

}  // namespace serial

namespace parallel {

std::vector<HalfCots> triangle_half_cots(std::span<const Vec3> vertices,
                                         std::span<const Tri> triangles) {
  std::vector<HalfCots> out(triangles.size());
  const auto n = static_cast<std::ptrdiff_t>(triangles.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const Tri& T = triangles[t];
    out[t] = corner_half_cots(vertices[T[0]], vertices[T[1]], vertices[T[2]]);
  }
  return out;
}

std::vector<double> edge_stiffness(std::span<const Edge> edge_triangles,
                                   std::span<const Tri> triangle_edges,
                                   std::span<const HalfCots> half_cots) {
  std::vector<double> kappa(edge_triangles.size());
  const auto n = static_cast<std::ptrdiff_t>(edge_triangles.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < n; ++e)
    kappa[e] = edge_kappa(edge_triangles[e], triangle_edges, half_cots, static_cast<int>(e));
  return kappa;
}

double xy_energy(std::span<const Edge> edges, std::span<const double> kappa,
                 std::span<const Vec3> v) {
  const std::size_t n = edges.size();
  const auto blocks = static_cast<std::ptrdiff_t>((n + kReductionBlock - 1) / kReductionBlock);
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t e = lo; e < hi; ++e)
      s += kappa[e] * (v[edges[e][0]] - v[edges[e][1]]).squaredNorm();
    partial[b] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return 0.5 * s;
}

double xy_energy_change(std::span<const Edge> edges, std::span<const double> kappa,
                        std::span<const Vec3> v, std::span<const Vec3> w) {
  const std::size_t n = edges.size();
  const auto blocks = static_cast<std::ptrdiff_t>((n + kReductionBlock - 1) / kReductionBlock);
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t e = lo; e < hi; ++e) s += kappa[e] * edge_change(edges[e], v, w);
    partial[b] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return 0.5 * s;
}

void xy_gradient(const Adjacency& adj, std::span<const double> kappa, std::span<const Vec3> v,
                 std::span<const Vec3> dv, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double g = 0.0;
    for (int k = adj.offsets[i]; k < adj.offsets[i + 1]; ++k)
      g += kappa[adj.edge[k]] * (v[i] - v[adj.neighbour[k]]).dot(dv[i]);
    out[i] = g;
  }
}

void triangle_energies(std::span<const Tri> triangles, std::span<const HalfCots> half_cots,
                       std::span<const Vec3> v, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(triangles.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < n; ++t) out[t] = triangle_energy(triangles[t], half_cots[t], v);
}

void mu_hat(std::span<const Tri> triangles, std::span<const Vec3> normals,
            std::span<const Vec3> v, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(triangles.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < n; ++t) out[t] = triangle_mu(triangles[t], normals, v);
}

void realize(std::span<const double> theta, std::span<const Vec3> e1, std::span<const Vec3> e2,
             std::span<Vec3> v, std::span<Vec3> dv) {
  const auto n = static_cast<std::ptrdiff_t>(theta.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double c = std::cos(theta[i]);
    const double s = std::sin(theta[i]);
    v[i] = c * e1[i] + s * e2[i];
    dv[i] = -s * e1[i] + c * e2[i];
  }
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace shellxy::kernels
