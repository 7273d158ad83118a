#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shellxy/kernels.hpp"
#include "shellxy/surface.hpp"

namespace shellxy {

using kernels::Edge;
using kernels::Tri;

/// Position of a vertex in the integer lattice of a structured generator (chart = cube face,
/// always 0 for single-chart generators). Used as the canonical correspondence for H4.
struct LatticeCoord {
  int chart = 0;
  int a = 0;
  int b = 0;
};

/// Immutable triangulation of (a patch of) an analytic surface.
///
/// Triangles are oriented counter-clockwise with respect to the surface normal. Edges are
/// unordered pairs (i < j) sorted lexicographically; `triangle_edges()[t][k]` is the edge
/// opposite corner k and `edge_triangles()[e]` lists the one or two incident triangles (-1 for
/// a missing one on a boundary edge).
class Triangulation {
 public:
  /// Orients triangles, checks that vertices lie on the surface, that triangles are
  /// non-degenerate and that every edge has at most two incident triangles, then assembles
  /// the stiffness coefficients.
  static Triangulation build(const Surface& surface, std::vector<Vec3> vertices,
                             std::vector<Tri> triangles, std::string generator = "custom",
                             std::vector<LatticeCoord> lattice = {});

  const Surface& surface() const { return surface_; }
  const std::string& generator() const { return generator_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  int euler_characteristic() const;

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const std::vector<Tri>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Tri>& triangle_edges() const { return triangle_edges_; }
  const std::vector<Edge>& edge_triangles() const { return edge_triangles_; }
  const kernels::Adjacency& adjacency() const { return adjacency_; }
  const std::vector<kernels::HalfCots>& half_cots() const { return half_cots_; }
  /// Per-edge stiffness coefficient kappa_e, aligned with edges().
  const std::vector<double>& stiffness() const { return kappa_; }
  const std::vector<LatticeCoord>& lattice() const { return lattice_; }

  /// Maximum triangle diameter.
  double mesh_size() const { return mesh_size_; }
  bool is_closed() const { return closed_; }

  /// Index of edge {i, j}, or -1 when the vertices are not adjacent.
  int edge_index(int i, int j) const;
  /// kappa^{ij}; zero for non-adjacent pairs.
  double kappa(int i, int j) const;

  double triangle_area(int t) const;
  double triangle_diameter(int t) const;
  Vec3 barycentre(int t) const;
  /// Vertices on edges with a single incident triangle, ascending.
  std::vector<int> boundary_vertices() const;

  /// Sub-complex spanned by the given triangles. `vertex_map`, if given, receives the
  /// original index of every vertex of the result.
  Triangulation submesh(std::span<const int> triangle_ids,
                        std::vector<int>* vertex_map = nullptr) const;

 private:
  explicit Triangulation(const Surface& s) : surface_(s) {}

  Surface surface_;
  std::string generator_;
  std::vector<Vec3> vertices_;
  std::vector<Vec3> normals_;
  std::vector<Tri> triangles_;
  std::vector<Edge> edges_;
  std::vector<Tri> triangle_edges_;
  std::vector<Edge> edge_triangles_;
  kernels::Adjacency adjacency_;
  std::vector<kernels::HalfCots> half_cots_;
  std::vector<double> kappa_;
  std::vector<LatticeCoord> lattice_;
  double mesh_size_ = 0.0;
  bool closed_ = true;
};

// Generators. All are deterministic functions of their arguments.
Triangulation gen_icosphere(const Surface& sphere, int level);
/// Cube faces split into n x n squares, each cut along the diagonal whose image on the sphere is
/// shorter, then projected radially.
Triangulation gen_cubed_sphere(const Surface& sphere, int n);
Triangulation gen_torus_mesh(const Surface& torus, int n_major, int n_minor);
/// Latitude-longitude sphere (negative fixture: pole valence grows with n_lon).
Triangulation gen_uv_sphere(const Surface& sphere, int n_lon, int n_lat);
/// Square [-half_width, half_width]^2 on a flat surface, n x n cells cut along one diagonal.
Triangulation gen_planar_grid(const Surface& plane, int n, double half_width);
/// Annulus r_in <= |z| <= r_out in normal coordinates around `centre`: log-spaced rings of
/// n_theta vertices, alternate rings rotated by half a step. Vertices are mapped by exp_map.
Triangulation gen_polar_annulus(const Surface& surface, const Vec3& centre, double r_in,
                                double r_out, int n_theta);

/// kappa as a sparse symmetric map (both (i,j) and (j,i) stored).
struct StiffnessEntry {
  int i;
  int j;
  double kappa;
};
std::vector<StiffnessEntry> assemble_stiffness(const Triangulation& tri);

struct HypothesisThresholds {
  double lambda = 8.0;       // H1: max(eps / min diam, 1 / min angle)
  double kappa_tol = 1e-12;  // H2: pass if min kappa >= -kappa_tol
  double lipschitz = 3.0;    // H3: Lip(P) + Lip(P^-1)
  double h4 = 1.0;           // H4: displacement * |log eps|
  double h4_window = 6.0;    // H4 window radius in units of eps
};

struct HypothesisReport {
  struct {
    double lambda_estimate = 0.0;
    double min_angle = 0.0;
    double min_diameter = 0.0;
    bool pass = false;
  } h1;
  struct {
    double min_kappa = 0.0;
    bool pass = false;
  } h2;
  struct {
    double lip_p = 0.0;
    double lip_p_inv = 0.0;
    bool pass = false;
  } h3;
  struct {
    double displacement_times_logeps = 0.0;
    bool pass = false;
    bool evaluated = false;
    std::string reason;
  } h4;
};

/// H4 is evaluated only when `h4_base` is given (the family context) and the mesh carries
/// lattice coordinates; otherwise h4.evaluated is false and h4.reason says why.
HypothesisReport validate_hypotheses(const Triangulation& tri,
                                     const HypothesisThresholds& thresholds = {},
                                     const std::optional<Vec3>& h4_base = std::nullopt);

/// Deviation of the 1/eps-rescaled mesh around the vertex nearest `base` from the lattice,
/// times |log eps|. The reference lattice is the linearisation of the generator at the base
/// vertex. Throws H4Unavailable when the mesh has no lattice coordinates.
double h4_displacement(const Triangulation& tri, const Vec3& base, double window);

/// Geodesic distance from `centre` to every vertex. Exact on the sphere and on flat surfaces;
/// elsewhere Dijkstra on the edge graph, seeded with chord distances to the nearest triangle.
std::vector<double> vertex_distances(const Triangulation& tri, const Vec3& centre);

struct DiscreteBall {
  std::vector<int> triangles;  // all three vertices closer than delta
  std::vector<int> boundary;   // vertices on the topological boundary of that complex
};
DiscreteBall discrete_ball(const Triangulation& tri, const Vec3& centre, double delta);

void write_off(std::ostream& os, const Triangulation& tri);
Triangulation read_off(std::istream& is, const Surface& surface);

}  // namespace shellxy
