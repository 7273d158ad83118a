#pragma once

#include <vector>

#include "shellxy/field.hpp"
#include "shellxy/vorticity.hpp"

namespace shellxy {

struct DyadicShell {
  int j = 0;
  double energy = 0.0;  // XY energy of the triangles with barycentre in the shell
  double excess = 0.0;  // energy - pi log 2
};

struct RenormalizedEstimate {
  std::vector<double> delta_values;       // decreasing
  std::vector<double> intrinsic_partial;  // E(M_delta) - extrinsic(M_delta) - K pi |log delta|
  std::vector<double> cauchy_differences;
  /// 1/2 int_M |dgamma[v_hat]|^2 over the whole surface.
  double extrinsic_term = 0.0;

  // Diagnostics per delta.
  std::vector<double> region_energy;           // XY energy over M_delta
  std::vector<double> region_extrinsic;        // extrinsic quadrature over M_delta
  std::vector<double> region_covariant;        // 1/2 int |P grad v_hat|^2 over M_delta
  std::vector<double> decomposition_residual;  // |E - covariant - extrinsic| / E over M_delta
  std::vector<double> area_residual;           // |area(M_delta) + sum area(B_delta) - area(M)|
  std::vector<double> straddling_area;         // area of triangles cut by some dB_delta

  /// Shells B_{2^-j rho} \ B_{2^-(j+1) rho}, rho = max delta, one array per defect.
  std::vector<std::vector<DyadicShell>> dyadic_shells;
  double shell_outer_energy = 0.0;  // triangles outside every B_rho
  double shell_inner_energy = 0.0;  // triangles inside the finest balls
  double total_energy = 0.0;
};

/// Renormalized-energy partial sums of a converged field with unit-charge defects. Triangles
/// belong to a ball when their barycentre does (mean of the vertex distances).
RenormalizedEstimate estimate_renormalized(const Triangulation& tri, const FrameField& frames,
                                           const DiscreteField& field, const DefectSet& defects,
                                           std::vector<double> delta_list);

}  // namespace shellxy
