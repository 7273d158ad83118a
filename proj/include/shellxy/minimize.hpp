#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "shellxy/field.hpp"

namespace shellxy {

enum class StepRule { FixedStep, BarzilaiBorwein, NonlinearCG };

struct SolveOptions {
  int max_iters = 20000;
  /// Max-norm gradient tolerance; <= 0 means 1e-8 x mean kappa.
  double grad_tol = 0.0;
  StepRule step_rule = StepRule::NonlinearCG;
  /// Initial step for FixedStep (before backtracking), in units of 1 / max vertex degree sum.
  double fixed_step = 1.0;
  std::uint64_t seed = 0;
  int restarts = 1;
  /// Record the total winding at every iteration and flag defect-crossing events.
  bool track_winding = false;
  /// Called with (iteration, field) every `checkpoint_every` iterations when both are set.
  int checkpoint_every = 0;
  std::function<void(int, const DiscreteField&)> checkpoint;
};

struct TraceRow {
  int iteration = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  int total_winding = 0;
  bool defect_crossing = false;  // some triangle had an ambiguous winding
};

struct SolveTrace {
  std::vector<TraceRow> iterates;
  bool converged = false;
  double wall_time = 0.0;
  std::vector<int> flagged_iterations;
};

struct SolveResult {
  DiscreteField field;
  SolveTrace trace;
  double energy = 0.0;
  double grad_norm = 0.0;
};

/// Critical point of the XY energy in angle coordinates. Never throws on non-convergence:
/// the best iterate is returned with trace.converged = false.
SolveResult minimize(const Triangulation& tri, const FrameField& frames,
                     const DiscreteField& init, const SolveOptions& opts);

/// As `minimize`, with the angles at `fixed_vertices` held exactly at their initial values.
SolveResult minimize_dirichlet(const Triangulation& tri, const FrameField& frames,
                               const DiscreteField& init, const std::vector<int>& fixed_vertices,
                               const SolveOptions& opts);

/// theta_i ~ Uniform(-pi, pi] from a generator seeded with (seed, stream).
DiscreteField random_field(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

struct RestartOutcome {
  std::vector<SolveResult> runs;  // one per restart, in restart order
  std::size_t best = 0;           // lowest energy, ties to the earlier restart
};
/// `opts.restarts` independent runs from random fields (stream = restart index).
RestartOutcome minimize_restarts(const Triangulation& tri, const FrameField& frames,
                                 const SolveOptions& opts);

/// Minimiser of the XY energy on the annulus delta/2 <= |z| <= delta in normal coordinates
/// around `centre`, started from the hedgehog and free at both boundaries.
struct AnnulusResult {
  Triangulation mesh;
  FrameField frames{};
  DiscreteField field{};
  SolveTrace trace{};
  double eta = 0.0;
  Vec3 centre = Vec3::Zero();
  TangentBasis basis{};
  int n_theta = 0;
  std::vector<double> ring_radii{};
  std::vector<Vec2> plane{};  // normal coordinates of the mesh vertices

  /// Unit tangent vector of the minimiser at a surface point (interpolated, radius clamped
  /// into the annulus).
  Vec3 sample(const Vec3& p) const;
};
AnnulusResult annulus_minimizer(const Surface& surface, const Vec3& centre, double delta,
                                int resolution, const SolveOptions& opts = {});

struct CoreEnergyOptions {
  bool use_annulus = true;  // otherwise the hedgehog h_R with R = identity
  int annulus_resolution = 256;
  SolveOptions solve;
};

struct CoreEnergyRow {
  double eps = 0.0;
  double gamma = 0.0;      // minimal energy in the discrete ball
  double remainder = 0.0;  // gamma - pi log(delta / eps)
  bool converged = false;
  int interior_winding = 0;
};

struct CoreEnergyTable {
  double delta = 0.0;
  double eta = 0.0;  // annulus constant used for the boundary data (0 without annulus)
  std::vector<CoreEnergyRow> rows;
  std::vector<double> differences;  // |r_{k+1} - r_k|
};

/// Dirichlet minimisation in the discrete ball B_delta(centre) of every mesh in `family`
/// (coarsest first) with degree-one boundary data.
CoreEnergyTable core_energy(const std::vector<const Triangulation*>& family, const Vec3& centre,
                            double delta, const CoreEnergyOptions& options = {});

}  // namespace shellxy
