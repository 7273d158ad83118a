#pragma once

#include <vector>

#include "shellxy/field.hpp"

namespace shellxy {

/// Per-triangle discrete vorticity sum_k ((n_k + n_{k+1}) / 2) . (v_k x v_{k+1}).
std::vector<double> mu_hat(const Triangulation& tri, const std::vector<Vec3>& v);

/// Rounding residual above which a triangle's winding is ambiguous.
inline constexpr double kWindingResidual = 0.45;

struct Windings {
  std::vector<int> winding;
  std::vector<double> residual;  // |sum / 2pi - winding|
  std::vector<char> ambiguous;   // residual >= kWindingResidual
  int total() const;
  std::size_t ambiguous_count() const;
};

/// Windings of all triangles from frame-transported edge angle differences.
Windings windings(const Triangulation& tri, const FrameField& frames, const DiscreteField& field);
/// Winding of one triangle; throws AmbiguousWinding when the residual is too large.
int triangle_winding(const Triangulation& tri, const FrameField& frames,
                     const DiscreteField& field, int t);

struct Defect {
  Vec3 position;
  int charge = 0;
  std::vector<int> triangles;
  double core_radius = 0.0;
};
using DefectSet = std::vector<Defect>;

struct VorticityReport {
  std::vector<double> mu_hat;
  Windings windings;
  DefectSet defects;
};

/// Union-find clusters of triangles with non-zero or ambiguous winding whose barycentres are
/// within `merge_radius` (chord distance; 0 means 3 eps). Position is the area-weighted
/// barycentre projected onto the surface. Throws AmbiguousWinding if more than 1% of the
/// triangles are ambiguous and UnresolvedRegion if a cluster contains only ambiguous ones.
DefectSet detect_defects(const Triangulation& tri, const FrameField& frames,
                         const DiscreteField& field, double merge_radius = 0.0);

VorticityReport vorticity_report(const Triangulation& tri, const FrameField& frames,
                                 const DiscreteField& field, double merge_radius = 0.0);

/// |sum_{T in region} mu_hat(T) - (2 pi sum d_i - int_region G)| with the curvature integral
/// by barycentre quadrature. Throws CoreOverlap if a defect lies within 3 eps of the region
/// boundary.
double region_vorticity_check(const Triangulation& tri, const FrameField& frames,
                              const DiscreteField& field, const std::vector<int>& region,
                              const DefectSet& defects_in_region);

/// Triangles whose interpolant at the barycentre is shorter than t_eps = eps |log eps|^2.
std::vector<char> core_indicator(const Triangulation& tri, const std::vector<Vec3>& v);

}  // namespace shellxy
