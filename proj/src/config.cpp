#include "shellxy/config.hpp"

#include <set>

#include "shellxy/error.hpp"
#include "shellxy/io.hpp"

namespace shellxy {

using nlohmann::json;

namespace {

// Typed access to one JSON object; remembers which keys were read so leftovers are rejected.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }
  const json& at(const std::string& key) {
    if (!has(key)) fail(name(key), "is required");
    return obj_.at(key);
  }
  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  T get(const std::string& key) {
    return convert<T>(at(key), name(key));
  }
  template <class T>
  void optional(const std::string& key, T& out) {
    if (has(key)) out = convert<T>(obj_.at(key), name(key));
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) fail(name(key), "is not a known field");
  }

  [[noreturn]] static void fail(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::ConfigError, "config field '" + field + "' " + what);
  }

  template <class T>
  static T convert(const json& j, const std::string& field) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!j.is_number()) fail(field, "must be a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!j.is_number_integer()) fail(field, "must be an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (j.is_number_integer() && !j.is_number_unsigned()) fail(field, "must be non-negative");
        }
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!j.is_boolean()) fail(field, "must be a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!j.is_string()) fail(field, "must be a string");
      }
      return j.get<T>();
    } catch (const json::exception& e) {
      fail(field, std::string("has the wrong type: ") + e.what());
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

Vec3 read_point(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) Fields::fail(field, "must be an array of 3 numbers");
  Vec3 p;
  for (int i = 0; i < 3; ++i) p[i] = Fields::convert<double>(j[i], field);
  return p;
}

SurfaceKind surface_kind(const std::string& s, const std::string& field) {
  if (s == "sphere") return SurfaceKind::Sphere;
  if (s == "torus") return SurfaceKind::Torus;
  if (s == "graph_bump" || s == "plane") return SurfaceKind::GraphBump;
  Fields::fail(field, "must be one of sphere, torus, graph_bump, plane");
}

ExperimentKind experiment_kind(const std::string& s) {
  if (s == "validate") return ExperimentKind::Validate;
  if (s == "minimize") return ExperimentKind::Minimize;
  if (s == "scaling") return ExperimentKind::Scaling;
  if (s == "core-energy") return ExperimentKind::CoreEnergy;
  if (s == "renorm") return ExperimentKind::Renormalized;
  Fields::fail("experiment", "must be one of validate, minimize, scaling, core-energy, renorm");
}

StepRule step_rule(const std::string& s) {
  if (s == "cg") return StepRule::NonlinearCG;
  if (s == "bb") return StepRule::BarzilaiBorwein;
  if (s == "fixed") return StepRule::FixedStep;
  Fields::fail("solve.step_rule", "must be one of cg, bb, fixed");
}

}  // namespace

Surface SurfaceSpec::build() const {
  switch (kind) {
    case SurfaceKind::Sphere: return Surface::sphere(radius);
    case SurfaceKind::Torus: return Surface::torus(major_radius, minor_radius);
    case SurfaceKind::GraphBump: return Surface::graph_bump(amplitude, width, period);
  }
  throw Error(ErrorCode::ConfigError, "unknown surface kind");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Validate: return "validate";
    case ExperimentKind::Minimize: return "minimize";
    case ExperimentKind::Scaling: return "scaling";
    case ExperimentKind::CoreEnergy: return "core-energy";
    case ExperimentKind::Renormalized: return "renorm";
  }
  return "?";
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  c.document = doc;
  Fields root(doc, "");
  if (root.get<int>("schema") != kConfigSchema) {
    Fields::fail("schema", "must be " + std::to_string(kConfigSchema));
  }
  if (root.has("experiment")) c.experiment = experiment_kind(root.get<std::string>("experiment"));
  root.optional("seed", c.seed);
  root.optional("output", c.output);

  {
    Fields f(root.at("surface"), "surface");
    const std::string kind = f.get<std::string>("kind");
    c.surface.kind = surface_kind(kind, "surface.kind");
    switch (c.surface.kind) {
      case SurfaceKind::Sphere: f.optional("radius", c.surface.radius); break;
      case SurfaceKind::Torus:
        c.surface.major_radius = f.get<double>("major_radius");
        c.surface.minor_radius = f.get<double>("minor_radius");
        break;
      case SurfaceKind::GraphBump:
        if (kind == "graph_bump") {
          c.surface.amplitude = f.get<double>("amplitude");
          c.surface.width = f.get<double>("width");
          c.surface.period = f.get<double>("period");
        } else {
          f.optional("period", c.surface.period);
        }
        break;
    }
    f.finish();
  }
  {
    Fields f(root.at("mesh"), "mesh");
    c.mesh.generator = f.get<std::string>("generator");
    static const std::set<std::string> known = {"icosphere", "cubed_sphere", "torus", "uv_sphere",
                                                "planar_grid"};
    if (!known.count(c.mesh.generator)) {
      Fields::fail("mesh.generator",
                   "must be one of icosphere, cubed_sphere, torus, uv_sphere, planar_grid");
    }
    const json& levels = f.at("levels");
    if (!levels.is_array() || levels.empty()) Fields::fail("mesh.levels", "must be a nonempty array");
    for (const json& l : levels) c.mesh.levels.push_back(Fields::convert<int>(l, "mesh.levels"));
    f.optional("major_per_minor", c.mesh.major_per_minor);
    f.optional("half_width", c.mesh.half_width);
    f.finish();
  }
  if (root.has("init")) {
    Fields f(root.at("init"), "init");
    f.optional("strategy", c.init.strategy);
    if (c.init.strategy != "random" && c.init.strategy != "ansatz") {
      Fields::fail("init.strategy", "must be random or ansatz");
    }
    f.optional("perturbation", c.init.perturbation);
    if (f.has("defects")) {
      const json& list = f.at("defects");
      if (!list.is_array()) Fields::fail("init.defects", "must be an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        Fields d(list[i], "init.defects[" + std::to_string(i) + "]");
        DefectSpec spec;
        spec.centre = read_point(d.at("centre"), d.name("centre"));
        spec.charge = d.get<int>("charge");
        d.finish();
        c.init.defects.push_back(spec);
      }
    }
    f.finish();
  }
  if (root.has("solve")) {
    Fields f(root.at("solve"), "solve");
    f.optional("max_iters", c.solve.max_iters);
    f.optional("grad_tol", c.solve.grad_tol);
    if (f.has("step_rule")) c.solve.step_rule = step_rule(f.get<std::string>("step_rule"));
    f.optional("fixed_step", c.solve.fixed_step);
    f.optional("restarts", c.solve.restarts);
    f.optional("track_winding", c.solve.track_winding);
    f.finish();
    if (c.solve.restarts < 1) Fields::fail("solve.restarts", "must be >= 1");
  }
  if (root.has("core_energy")) {
    Fields f(root.at("core_energy"), "core_energy");
    c.core.centre = read_point(f.at("centre"), "core_energy.centre");
    c.core.delta = f.get<double>("delta");
    f.optional("use_annulus", c.core.use_annulus);
    f.optional("annulus_resolution", c.core.annulus_resolution);
    f.finish();
  }
  if (root.has("renorm")) {
    Fields f(root.at("renorm"), "renorm");
    const json& d = f.at("deltas");
    if (!d.is_array()) Fields::fail("renorm.deltas", "must be an array");
    for (const json& x : d) c.renorm_deltas.push_back(Fields::convert<double>(x, "renorm.deltas"));
    f.finish();
  }
  if (root.has("validate")) {
    Fields f(root.at("validate"), "validate");
    if (f.has("h4_base")) c.h4_base = read_point(f.at("h4_base"), "validate.h4_base");
    f.optional("lambda", c.thresholds.lambda);
    f.optional("kappa_tol", c.thresholds.kappa_tol);
    f.optional("lipschitz", c.thresholds.lipschitz);
    f.optional("h4", c.thresholds.h4);
    f.optional("h4_window", c.thresholds.h4_window);
    f.finish();
  }
  root.finish();
  c.solve.seed = c.seed;
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

std::string ExperimentConfig::hash() const {
  json d = document;
  d.erase("output");  // where results go does not change what they are
  return sha256_hex(d.dump());
}

void ExperimentConfig::set_seed(std::uint64_t s) {
  seed = s;
  solve.seed = s;
  document["seed"] = s;
}

void ExperimentConfig::set_output(const std::string& dir) {
  output = dir;
  document["output"] = dir;
}

Triangulation build_mesh(const ExperimentConfig& cfg, int level) {
  const Surface S = cfg.surface.build();
  const std::string& g = cfg.mesh.generator;
  if (g == "icosphere") return gen_icosphere(S, level);
  if (g == "cubed_sphere") return gen_cubed_sphere(S, level);
  if (g == "torus") return gen_torus_mesh(S, cfg.mesh.major_per_minor * level, level);
  if (g == "uv_sphere") return gen_uv_sphere(S, level, level / 2);
  if (g == "planar_grid") return gen_planar_grid(S, level, cfg.mesh.half_width);
  throw Error(ErrorCode::ConfigError, "unknown generator " + g);
}

}  // namespace shellxy
