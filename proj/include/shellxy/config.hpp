#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "shellxy/field.hpp"
#include "shellxy/mesh.hpp"
#include "shellxy/minimize.hpp"

namespace shellxy {

inline constexpr int kConfigSchema = 1;

enum class ExperimentKind { Validate, Minimize, Scaling, CoreEnergy, Renormalized };

struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::Sphere;
  double radius = 1.0;
  double major_radius = 2.0;
  double minor_radius = 0.5;
  double amplitude = 0.0;
  double width = 1.0;
  double period = 1000.0;
  Surface build() const;
};

/// Generators and what a level means for each:
///   icosphere: subdivision level; cubed_sphere: cells per cube edge;
///   torus: minor-circle segments (major = major_per_minor x level);
///   uv_sphere: longitude segments (latitude = level / 2); planar_grid: cells per side.
struct MeshSpec {
  std::string generator;
  std::vector<int> levels;
  int major_per_minor = 4;
  double half_width = 1.0;
};

/// "random": uniform angles per restart. "ansatz": hedgehog_ansatz of `defects` (the canonical
/// field when empty); restarts after the first add `perturbation` x uniform(-pi, pi] noise.
struct InitSpec {
  std::string strategy = "random";
  std::vector<DefectSpec> defects;
  double perturbation = 0.0;
};

struct CoreEnergySpec {
  Vec3 centre = Vec3::Zero();
  double delta = 0.0;
  bool use_annulus = true;
  int annulus_resolution = 256;
};

struct ExperimentConfig {
  std::optional<ExperimentKind> experiment;
  SurfaceSpec surface;
  MeshSpec mesh;
  InitSpec init;
  SolveOptions solve;
  std::uint64_t seed = 0;
  std::string output;
  CoreEnergySpec core;
  std::vector<double> renorm_deltas;
  std::optional<Vec3> h4_base;
  HypothesisThresholds thresholds;
  /// The document as read, with command-line overrides applied; its hash identifies the run.
  nlohmann::json document;

  std::string hash() const;
  void set_seed(std::uint64_t s);
  void set_output(const std::string& dir);
};

/// Validates against the schema; unknown or missing fields raise ConfigError naming the field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

Triangulation build_mesh(const ExperimentConfig& cfg, int level);

std::string to_string(ExperimentKind kind);

}  // namespace shellxy
