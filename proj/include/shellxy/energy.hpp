#pragma once

#include <map>
#include <string>
#include <vector>

#include "shellxy/field.hpp"

namespace shellxy {

/// 1/2 sum_e kappa_e |v_a - v_b|^2 over all edges.
double xy_energy(const Triangulation& tri, const FrameField& frames, const DiscreteField& field);
/// Same energy localised to a set of triangles (each triangle carries its own share of kappa).
double xy_energy(const Triangulation& tri, const FrameField& frames, const DiscreteField& field,
                 const std::vector<int>& region);
/// Per-triangle energies 1/2 int_T |grad v_hat|^2; they sum to the total energy.
std::vector<double> triangle_energies(const Triangulation& tri, const std::vector<Vec3>& v);

/// dE/dtheta_i.
std::vector<double> xy_gradient(const Triangulation& tri, const FrameField& frames,
                                const DiscreteField& field);

/// Weights of the covariant (D) and shape-operator terms in the continuum energy density.
/// The torus convergence study reports which one the discrete energy approaches.
enum class EnergyWeighting {
  NematicShell,         // |Du|^2 + 1/2 |dgamma[u]|^2
  FullSurfaceGradient,  // |Du|^2 + |dgamma[u]|^2 = |grad_s u|^2
  HalfSurfaceGradient,  // 1/2 (|Du|^2 + |dgamma[u]|^2)
};

/// Integral of the weighted density over the surface (one period cell for graph surfaces) by
/// midpoint quadrature on a resolution x resolution parameter grid.
double extrinsic_energy(const Surface& surface, const TangentField& u, int resolution,
                        EnergyWeighting weighting = EnergyWeighting::NematicShell);

/// energy - K pi log(1/eps).
double renormalized_remainder(double energy, double eps, int K);

struct EnergyBreakdown {
  double total = 0.0;
  std::map<std::string, double> per_region;
  double renormalized_remainder = 0.0;
  double log_eps = 0.0;
  int defect_count = 0;
};

/// Breakdown with per-region energies; `regions` maps a name to a set of triangles.
EnergyBreakdown energy_breakdown(const Triangulation& tri, const FrameField& frames,
                                 const DiscreteField& field, int defect_count,
                                 const std::map<std::string, std::vector<int>>& regions = {});

}  // namespace shellxy
