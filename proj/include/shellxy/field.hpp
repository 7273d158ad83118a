#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "shellxy/mesh.hpp"

namespace shellxy {

/// Per-vertex tangent frames, stored as parallel arrays so kernels can take spans.
struct FrameField {
  std::vector<Vec3> e1;
  std::vector<Vec3> e2;
  std::vector<Vec3> normal;

  std::size_t size() const { return e1.size(); }
  TangentBasis at(std::size_t i) const { return {e1[i], e2[i], normal[i]}; }
};

/// Per-vertex angle, unwrapped: v(i) = cos(theta_i) e1(i) + sin(theta_i) e2(i).
struct DiscreteField {
  std::vector<double> theta;
};

/// Smooth tangent vector field on the surface, evaluated at surface points.
using TangentField = std::function<Vec3(const Vec3&)>;

/// Frames from the tangential projection of `axis` (the x-axis by default), with a fallback
/// axis when the normal is within 1e-6 of it.
FrameField build_frames(const Triangulation& tri, const Vec3& axis = Vec3::UnitX());

std::vector<Vec3> realize(const DiscreteField& field, const FrameField& frames);

DiscreteField restrict_smooth(const Triangulation& tri, const FrameField& frames,
                              const TangentField& f);

/// Affine interpolant of the vertex vectors on triangle t at barycentric coordinates `lambda`.
Vec3 interpolant_eval(const Triangulation& tri, const std::vector<Vec3>& v, int t,
                      const Vec3& lambda);

/// Angle tau_e of the frame at edges()[e][1] relative to the frame at edges()[e][0] carried
/// over by the minimal rotation taking one normal to the other. A field that is parallel
/// along the edge has theta_b - theta_a + tau_e = 0.
std::vector<double> edge_transport(const Triangulation& tri, const FrameField& frames);

struct DefectSpec {
  Vec3 centre;
  int charge = 1;  // +1 or -1
};

struct AnsatzOptions {
  /// Radius of the discs carrying the hedgehog profile; 0 picks a quarter of the minimum
  /// defect separation (half the injectivity radius for a single defect).
  double sigma = 0.0;
};

/// Hedgehogs z/|z| (conjugated for charge -1) in normal coordinates inside discs around
/// the defects, joined by the harmonic extension of the connection Laplacian outside them.
/// Each disc after the first is rotated by the constant phase that minimises the energy of
/// the extension (a source and a sink instead of two sources on the sphere, for instance).
/// Without defects the canonical non-vanishing field of the surface is restricted instead.
DiscreteField hedgehog_ansatz(const Triangulation& tri, const FrameField& frames,
                              const std::vector<DefectSpec>& defects,
                              const AnsatzOptions& options = {});

// Canonical analytic fields.
/// Normalised d/d(major angle) on a torus; d/dx on a graph surface.
TangentField canonical_field(const Surface& surface);
/// Unnormalised d/d(longitude) on a sphere; vanishes at the poles.
TangentField longitude_field(const Surface& sphere);

// Interpolant diagnostics over the 9-point sample set of each triangle.
struct InterpolantBounds {
  double max_norm = 0.0;   // sup |v_hat|
  double min_norm = 0.0;   // inf |v_hat|
  double gl_constant = 0.0;  // sup eps^-2 (1 - |v_hat|^2)^2 / |grad v_hat|^2
};
InterpolantBounds interpolant_bounds(const Triangulation& tri, const std::vector<Vec3>& v);

/// CSV with a `# mesh <hash>` header line followed by `vertex_index,theta` rows.
void write_field_csv(std::ostream& os, const DiscreteField& field, const std::string& mesh_hash);
/// Throws IoError if the header hash differs from `expected_mesh_hash` (when non-empty).
DiscreteField read_field_csv(std::istream& is, const std::string& expected_mesh_hash = {});

}  // namespace shellxy
