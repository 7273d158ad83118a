#pragma once

#include <filesystem>
#include <json.hpp>

#include "shellxy/config.hpp"
#include "shellxy/vorticity.hpp"

namespace shellxy {

struct RunContext {
  std::filesystem::path out;
  int jobs = 1;
  int checkpoint_every = 0;
};

/// Field for restart `k` of the configured init strategy.
DiscreteField initial_field(const ExperimentConfig& cfg, const Triangulation& tri,
                            const FrameField& frames, int k);

struct LevelSolve {
  SolveResult best;
  std::size_t best_index = 0;
  std::vector<double> energies;
  std::vector<char> converged;
};
/// (restart, iteration, field) for periodic checkpoints.
using CheckpointFn = std::function<void(int, int, const DiscreteField&)>;

/// All restarts on one mesh (up to `jobs` at a time); ties go to the earlier restart.
LevelSolve solve_restarts(const ExperimentConfig& cfg, const Triangulation& tri,
                          const FrameField& frames, int jobs, int checkpoint_every = 0,
                          const CheckpointFn& checkpoint = {});

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
/// Least-squares line through (x_i, y_i); needs two distinct x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::json defects_json(const DefectSet& defects);

// Each writes its artifacts under ctx.out and returns the report it wrote to report.json.
nlohmann::json run_mesh(const ExperimentConfig& cfg, const RunContext& ctx);
nlohmann::json run_validate(const ExperimentConfig& cfg, const RunContext& ctx);
nlohmann::json run_minimize(const ExperimentConfig& cfg, const RunContext& ctx);
/// Recomputes defects and energy from mesh.off and field.csv of an earlier minimize run.
nlohmann::json run_defects(const ExperimentConfig& cfg, const RunContext& ctx);
nlohmann::json run_scaling(const ExperimentConfig& cfg, const RunContext& ctx);
nlohmann::json run_core_energy(const ExperimentConfig& cfg, const RunContext& ctx);
nlohmann::json run_renormalized(const ExperimentConfig& cfg, const RunContext& ctx);

/// Pretty JSON text with a trailing newline, as written to disk.
std::string json_text(const nlohmann::json& j);

}  // namespace shellxy
