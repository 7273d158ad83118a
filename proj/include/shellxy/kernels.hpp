#pragma once

// Data-parallel inner loops. Every kernel exists twice with the same signature:
// `serial::` is the straightforward reference kept for testing, `parallel::` is the OpenMP
// version used by the library. Reductions in `parallel::` use fixed-size blocks summed in a
// fixed order, so results do not depend on the thread count.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "shellxy/surface.hpp"

namespace shellxy::kernels {

using Tri = std::array<int, 3>;
using Edge = std::array<int, 2>;
using HalfCots = std::array<double, 3>;

/// Compressed vertex adjacency: neighbours of v are entries [offsets[v], offsets[v + 1]).
struct Adjacency {
  std::vector<int> offsets;
  std::vector<int> neighbour;
  std::vector<int> edge;
};

inline constexpr std::size_t kReductionBlock = 1024;

namespace serial {
// Half cotangent of the angle at each corner; entry k belongs to the edge opposite corner k.
std::vector<HalfCots> triangle_half_cots(std::span<const Vec3> vertices,
                                         std::span<const Tri> triangles);
// Per-edge stiffness summed over the incident triangles (-1 marks a missing triangle).
std::vector<double> edge_stiffness(std::span<const Edge> edge_triangles,
                                   std::span<const Tri> triangle_edges,
                                   std::span<const HalfCots> half_cots);
// 1/2 sum over edges of kappa |v_i - v_j|^2.
double xy_energy(std::span<const Edge> edges, std::span<const double> kappa,
                 std::span<const Vec3> v);
// dE/dtheta_i = sum_j kappa_ij (v_i - v_j) . dv_i
void xy_gradient(const Adjacency& adj, std::span<const double> kappa, std::span<const Vec3> v,
                 std::span<const Vec3> dv, std::span<double> out);
// Per-triangle Dirichlet energy 1/2 int_T |grad v|^2 of the affine interpolant.
void triangle_energies(std::span<const Tri> triangles, std::span<const HalfCots> half_cots,
                       std::span<const Vec3> v, std::span<double> out);
// Per-triangle discrete vorticity with edge-averaged normals.
void mu_hat(std::span<const Tri> triangles, std::span<const Vec3> normals,
            std::span<const Vec3> v, std::span<double> out);
// v = cos(theta) e1 + sin(theta) e2 and dv = dv/dtheta.
void realize(std::span<const double> theta, std::span<const Vec3> e1, std::span<const Vec3> e2,
             std::span<Vec3> v, std::span<Vec3> dv);
// Energy change when every v_i moves by w_i, as 1/2 sum kappa (w_a - w_b).(2(v_a - v_b) +
// (w_a - w_b)); free of the cancellation in E(v + w) - E(v).
double xy_energy_change(std::span<const Edge> edges, std::span<const double> kappa,
                        std::span<const Vec3> v, std::span<const Vec3> w);
}  // namespace serial

namespace parallel {
// Half cotangent of the angle at each corner; entry k belongs to the edge opposite corner k.
std::vector<HalfCots> triangle_half_cots(std::span<const Vec3> vertices,
                                         std::span<const Tri> triangles);
// Per-edge stiffness summed over the incident triangles (-1 marks a missing triangle).
std::vector<double> edge_stiffness(std::span<const Edge> edge_triangles,
                                   std::span<const Tri> triangle_edges,
                                   std::span<const HalfCots> half_cots);
// 1/2 sum over edges of kappa |v_i - v_j|^2.
double xy_energy(std::span<const Edge> edges, std::span<const double> kappa,
                 std::span<const Vec3> v);
// dE/dtheta_i = sum_j kappa_ij (v_i - v_j) . dv_i
void xy_gradient(const Adjacency& adj, std::span<const double> kappa, std::span<const Vec3> v,
                 std::span<const Vec3> dv, std::span<double> out);
// Per-triangle Dirichlet energy 1/2 int_T |grad v|^2 of the affine interpolant.
void triangle_energies(std::span<const Tri> triangles, std::span<const HalfCots> half_cots,
                       std::span<const Vec3> v, std::span<double> out);
// Per-triangle discrete vorticity with edge-averaged normals.
void mu_hat(std::span<const Tri> triangles, std::span<const Vec3> normals,
            std::span<const Vec3> v, std::span<double> out);
// v = cos(theta) e1 + sin(theta) e2 and dv = dv/dtheta.
void realize(std::span<const double> theta, std::span<const Vec3> e1, std::span<const Vec3> e2,
             std::span<Vec3> v, std::span<Vec3> dv);
// Energy change when every v_i moves by w_i, as 1/2 sum kappa (w_a - w_b).(2(v_a - v_b) +
// (w_a - w_b)); free of the cancellation in E(v + w) - E(v).
double xy_energy_change(std::span<const Edge> edges, std::span<const double> kappa,
                        std::span<const Vec3> v, std::span<const Vec3> w);
}  // namespace parallel

/// Number of OpenMP threads available to `parallel::` kernels (1 without OpenMP).
int max_threads();

}  // namespace shellxy::kernels
