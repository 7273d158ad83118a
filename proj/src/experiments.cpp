#include "shellxy/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

#include "shellxy/energy.hpp"
#include "shellxy/error.hpp"
#include "shellxy/io.hpp"
#include "shellxy/renormalized.hpp"

namespace shellxy {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

json base_report(const ExperimentConfig& cfg, const std::string& command) {
  return {{"schema", kConfigSchema},
          {"command", command},
          {"config_hash", cfg.hash()},
          {"rng", {{"generator", "mt19937_64"}, {"seed", cfg.seed}, {"stream", "restart index"}}}};
}

void finish_report(json& report, const RunContext& ctx, Clock::time_point start) {
  report["wall_time"] = std::chrono::duration<double>(Clock::now() - start).count();
  write_atomic(ctx.out / "report.json", json_text(report));
}

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::string text = header + "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + row[i];
    text += '\n';
  }
  write_atomic(path, text);
}

std::string field_text(const DiscreteField& f, const std::string& hash) {
  std::ostringstream os;
  write_field_csv(os, f, hash);
  return os.str();
}

int single_level(const ExperimentConfig& cfg, const std::string& command) {
  if (cfg.mesh.levels.size() != 1) {
    throw Error(ErrorCode::ConfigError,
                "config field 'mesh.levels' must hold exactly one level for " + command);
  }
  return cfg.mesh.levels.front();
}

void require_experiment(const ExperimentConfig& cfg, ExperimentKind kind) {
  if (cfg.experiment && *cfg.experiment != kind) {
    throw Error(ErrorCode::ConfigError, "config field 'experiment' is " +
                                            to_string(*cfg.experiment) + ", not " +
                                            to_string(kind));
  }
}

json energy_json(const Triangulation& tri, const FrameField& frames, const DiscreteField& field,
                 const DefectSet& defects) {
  const EnergyBreakdown b =
      energy_breakdown(tri, frames, field, static_cast<int>(defects.size()));
  return {{"total", b.total},
          {"log_eps", b.log_eps},
          {"eps", tri.mesh_size()},
          {"defect_count", b.defect_count},
          {"renormalized_remainder", b.renormalized_remainder}};
}

int total_charge(const DefectSet& defects) {
  int s = 0;
  for (const Defect& d : defects) s += d.charge;
  return s;
}

}  // namespace

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

DiscreteField initial_field(const ExperimentConfig& cfg, const Triangulation& tri,
                            const FrameField& frames, int k) {
  const std::size_t n = tri.num_vertices();
  if (cfg.init.strategy == "random") return random_field(n, cfg.seed, static_cast<std::uint64_t>(k));
  DiscreteField f = hedgehog_ansatz(tri, frames, cfg.init.defects);
  if (k > 0 && cfg.init.perturbation != 0.0) {
    const DiscreteField noise = random_field(n, cfg.seed, static_cast<std::uint64_t>(k));
    for (std::size_t i = 0; i < n; ++i) f.theta[i] += cfg.init.perturbation * noise.theta[i];
  }
  return f;
}

LevelSolve solve_restarts(const ExperimentConfig& cfg, const Triangulation& tri,
                          const FrameField& frames, int jobs, int checkpoint_every,
                          const CheckpointFn& checkpoint) {
  const int count = std::max(1, cfg.solve.restarts);
  std::vector<DiscreteField> inits;
  for (int k = 0; k < count; ++k) inits.push_back(initial_field(cfg, tri, frames, k));
  std::vector<SolveResult> runs(count);
#pragma omp parallel for num_threads(std::max(1, jobs)) schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    SolveOptions o = cfg.solve;
    if (checkpoint && checkpoint_every > 0) {
      o.checkpoint_every = checkpoint_every;
      o.checkpoint = [&checkpoint, k](int it, const DiscreteField& f) { checkpoint(k, it, f); };
    }
    runs[k] = minimize(tri, frames, inits[k], o);
  }
  LevelSolve out;
  for (int k = 0; k < count; ++k) {
    out.energies.push_back(runs[k].energy);
    out.converged.push_back(runs[k].trace.converged);
    if (runs[k].energy < runs[out.best_index].energy) out.best_index = k;
  }
  out.best = std::move(runs[out.best_index]);
  return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::PreconditionViolated, "a line fit needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw Error(ErrorCode::PreconditionViolated, "line fit with identical abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

json defects_json(const DefectSet& defects) {
  json list = json::array();
  for (const Defect& d : defects) {
    list.push_back({{"position", {d.position.x(), d.position.y(), d.position.z()}},
                    {"charge", d.charge},
                    {"triangles", d.triangles.size()},
                    {"core_radius", d.core_radius}});
  }
  return list;
}

json run_mesh(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto start = Clock::now();
  json report = base_report(cfg, "mesh");
  report["levels"] = json::array();
  for (int level : cfg.mesh.levels) {
    const Triangulation tri = build_mesh(cfg, level);
    const std::string off = off_text(tri);
    write_atomic(ctx.out / ("level_" + std::to_string(level)) / "mesh.off", off);
    report["levels"].push_back({{"level", level},
                                {"vertices", tri.num_vertices()},
                                {"edges", tri.num_edges()},
                                {"triangles", tri.num_triangles()},
                                {"euler_characteristic", tri.euler_characteristic()},
                                {"eps", tri.mesh_size()},
                                {"mesh_hash", git_blob_sha1(off)}});
  }
  finish_report(report, ctx, start);
  return report;
}

json run_validate(const ExperimentConfig& cfg, const RunContext& ctx) {
  require_experiment(cfg, ExperimentKind::Validate);
  const auto start = Clock::now();
  json report = base_report(cfg, "validate");
  report["levels"] = json::array();
  std::vector<double> h4;
  bool all_pass = true;
  for (int level : cfg.mesh.levels) {
    const Triangulation tri = build_mesh(cfg, level);
    const HypothesisReport h = validate_hypotheses(tri, cfg.thresholds, cfg.h4_base);
    all_pass = all_pass && h.h1.pass && h.h2.pass && h.h3.pass;
    if (h.h4.evaluated) h4.push_back(h.h4.displacement_times_logeps);
    report["levels"].push_back(
        {{"level", level},
         {"eps", tri.mesh_size()},
         {"mesh_hash", mesh_hash(tri)},
         {"h1", {{"lambda", h.h1.lambda_estimate}, {"min_angle", h.h1.min_angle},
                 {"min_diameter", h.h1.min_diameter}, {"pass", h.h1.pass}}},
         {"h2", {{"min_kappa", h.h2.min_kappa}, {"pass", h.h2.pass}}},
         {"h3", {{"lip_p", h.h3.lip_p}, {"lip_p_inv", h.h3.lip_p_inv}, {"pass", h.h3.pass}}},
         {"h4", {{"evaluated", h.h4.evaluated}, {"metric", h.h4.displacement_times_logeps},
                 {"pass", h.h4.pass}, {"reason", h.h4.reason}}}});
  }
  bool decreasing = h4.size() >= 2;
  for (std::size_t i = 1; i < h4.size(); ++i) decreasing = decreasing && h4[i] < h4[i - 1];
  report["h1_h3_pass_all"] = all_pass;
  report["h4_decreasing"] = decreasing;
  finish_report(report, ctx, start);
  return report;
}

json run_minimize(const ExperimentConfig& cfg, const RunContext& ctx) {
  require_experiment(cfg, ExperimentKind::Minimize);
  const auto start = Clock::now();
  const int level = single_level(cfg, "minimize");
  const Triangulation tri = build_mesh(cfg, level);
  const FrameField frames = build_frames(tri);
  const std::string off = off_text(tri);
  const std::string hash = git_blob_sha1(off);
  CheckpointFn checkpoint;
  if (ctx.checkpoint_every > 0) {
    checkpoint = [&](int k, int it, const DiscreteField& f) {
      write_atomic(ctx.out / "checkpoints" /
                       ("restart_" + std::to_string(k) + "_iter_" + std::to_string(it) + ".csv"),
                   field_text(f, hash));
    };
  }
  const LevelSolve s = solve_restarts(cfg, tri, frames, ctx.jobs, ctx.checkpoint_every, checkpoint);
  const DefectSet defects = detect_defects(tri, frames, s.best.field);
  const std::string cfg_hash = cfg.hash();

  write_atomic(ctx.out / "mesh.off", off);
  write_atomic(ctx.out / "field.csv", field_text(s.best.field, hash));
  write_atomic(ctx.out / "trace.csv", trace_csv(s.best.trace, cfg.solve.track_winding));
  json dj = {{"config_hash", cfg_hash}, {"mesh_hash", hash}, {"total_charge", total_charge(defects)},
             {"defects", defects_json(defects)}};
  write_atomic(ctx.out / "defects.json", json_text(dj));
  json ej = energy_json(tri, frames, s.best.field, defects);
  ej["config_hash"] = cfg_hash;
  ej["mesh_hash"] = hash;
  write_atomic(ctx.out / "energy.json", json_text(ej));

  json report = base_report(cfg, "minimize");
  report["mesh_hash"] = hash;
  report["level"] = level;
  report["eps"] = tri.mesh_size();
  report["restarts"] = json::array();
  for (std::size_t k = 0; k < s.energies.size(); ++k)
    report["restarts"].push_back({{"energy", s.energies[k]}, {"converged", s.converged[k] != 0}});
  report["best_restart"] = s.best_index;
  report["energy"] = s.best.energy;
  report["grad_norm"] = s.best.grad_norm;
  report["iterations"] = s.best.trace.iterates.size() - 1;
  report["converged"] = s.best.trace.converged;
  report["flagged_iterations"] = s.best.trace.flagged_iterations;
  report["total_winding"] = windings(tri, frames, s.best.field).total();
  report["defect_count"] = defects.size();
  report["total_charge"] = total_charge(defects);
  finish_report(report, ctx, start);
  return report;
}

json run_defects(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto start = Clock::now();
  std::istringstream off(read_text(ctx.out / "mesh.off"));
  const Triangulation tri = read_off(off, cfg.surface.build());
  const std::string hash = mesh_hash(tri);
  std::istringstream csv(read_text(ctx.out / "field.csv"));
  const DiscreteField field = read_field_csv(csv, hash);
  const FrameField frames = build_frames(tri);
  if (field.theta.size() != tri.num_vertices()) {
    throw Error(ErrorCode::LengthMismatch, "field.csv does not match mesh.off");
  }
  const DefectSet defects = detect_defects(tri, frames, field);
  const json energy = energy_json(tri, frames, field, defects);

  json report = base_report(cfg, "defects");
  report["mesh_hash"] = hash;
  report["defects"] = defects_json(defects);
  report["total_charge"] = total_charge(defects);
  report["energy"] = energy;
  bool match = true;
  if (fs::exists(ctx.out / "defects.json") && fs::exists(ctx.out / "energy.json")) {
    const json old_d = json::parse(read_text(ctx.out / "defects.json"));
    const json old_e = json::parse(read_text(ctx.out / "energy.json"));
    std::vector<int> a, b;
    for (const auto& d : old_d.at("defects")) a.push_back(d.at("charge").get<int>());
    for (const Defect& d : defects) b.push_back(d.charge);
    const double e_old = old_e.at("total").get<double>();
    match = a == b && std::abs(e_old - energy.at("total").get<double>()) <= 1e-12 * std::abs(e_old);
    report["artifacts_consistent"] = match;
  }
  // Kept apart from the artifacts it checks.
  const RunContext here{ctx.out / "recheck", ctx.jobs, 0};
  finish_report(report, here, start);
  return report;
}

json run_scaling(const ExperimentConfig& cfg, const RunContext& ctx) {
  require_experiment(cfg, ExperimentKind::Scaling);
  if (cfg.mesh.levels.size() < 3) {
    throw Error(ErrorCode::PreconditionViolated, "a scaling study needs at least 3 levels");
  }
  const auto start = Clock::now();
  const std::size_t L = cfg.mesh.levels.size();
  struct Row {
    double eps = 0.0, energy = 0.0;
    bool converged = false;
    int converged_runs = 0, defects = 0, charge = 0;
    std::string hash;
  };
  std::vector<Row> rows(L);
  std::vector<std::exception_ptr> errors(L);
#pragma omp parallel for num_threads(std::max(1, ctx.jobs)) schedule(dynamic)
  for (std::size_t i = 0; i < L; ++i) {
    try {
      const Triangulation tri = build_mesh(cfg, cfg.mesh.levels[i]);
      const FrameField frames = build_frames(tri);
      const LevelSolve s = solve_restarts(cfg, tri, frames, 1);
      const DefectSet d = detect_defects(tri, frames, s.best.field);
      Row& r = rows[i];
      r.eps = tri.mesh_size();
      r.energy = s.best.energy;
      r.converged = s.best.trace.converged;
      for (char c : s.converged) r.converged_runs += c;
      r.defects = static_cast<int>(d.size());
      r.charge = total_charge(d);
      r.hash = mesh_hash(tri);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> x, y;
  std::vector<std::vector<std::string>> csv;
  json levels = json::array();
  for (std::size_t i = 0; i < L; ++i) {
    const Row& r = rows[i];
    const double log_inv = -std::log(r.eps);
    if (r.converged) {
      x.push_back(log_inv);
      y.push_back(r.energy);
    }
    csv.push_back({std::to_string(cfg.mesh.levels[i]), format_double(r.eps), format_double(log_inv),
                   format_double(r.energy), r.converged ? "1" : "0", std::to_string(r.defects),
                   std::to_string(r.charge)});
    levels.push_back({{"level", cfg.mesh.levels[i]}, {"eps", r.eps}, {"log_inv_eps", log_inv},
                      {"energy", r.energy}, {"converged", r.converged},
                      {"converged_restarts", r.converged_runs}, {"defect_count", r.defects},
                      {"total_charge", r.charge}, {"mesh_hash", r.hash}});
  }
  write_csv(ctx.out / "scaling.csv", "level,eps,log_inv_eps,energy,converged,defects,total_charge",
            csv);
  json report = base_report(cfg, "scaling");
  report["levels"] = levels;
  const double target = std::numbers::pi * std::abs(cfg.surface.build().euler_characteristic());
  report["target_slope"] = target;
  report["fitted_levels"] = x.size();
  if (x.size() >= 2) {
    const LineFit f = fit_line(x, y);
    report["slope"] = f.slope;
    report["intercept"] = f.intercept;
  } else {
    report["slope"] = nullptr;
    report["intercept"] = nullptr;
  }
  finish_report(report, ctx, start);
  return report;
}

json run_core_energy(const ExperimentConfig& cfg, const RunContext& ctx) {
  require_experiment(cfg, ExperimentKind::CoreEnergy);
  const auto start = Clock::now();
  std::vector<Triangulation> meshes;
  for (int level : cfg.mesh.levels) meshes.push_back(build_mesh(cfg, level));
  std::sort(meshes.begin(), meshes.end(), [](const Triangulation& a, const Triangulation& b) {
    return a.mesh_size() > b.mesh_size();
  });
  std::vector<const Triangulation*> family;
  for (const auto& m : meshes) family.push_back(&m);
  CoreEnergyOptions opts;
  opts.use_annulus = cfg.core.use_annulus;
  opts.annulus_resolution = cfg.core.annulus_resolution;
  opts.solve = cfg.solve;
  const CoreEnergyTable t = core_energy(family, cfg.core.centre, cfg.core.delta, opts);

  std::vector<std::vector<std::string>> csv;
  json rows = json::array();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const CoreEnergyRow& r = t.rows[i];
    csv.push_back({format_double(r.eps), format_double(r.gamma), format_double(r.remainder),
                   r.converged ? "1" : "0", std::to_string(r.interior_winding)});
    rows.push_back({{"eps", r.eps}, {"gamma", r.gamma}, {"remainder", r.remainder},
                    {"converged", r.converged}, {"interior_winding", r.interior_winding},
                    {"mesh_hash", mesh_hash(meshes[i])}});
  }
  write_csv(ctx.out / "core_energy.csv", "eps,gamma,remainder,converged,interior_winding", csv);
  bool decreasing = t.differences.size() >= 2;
  for (std::size_t i = 1; i < t.differences.size(); ++i)
    decreasing = decreasing && t.differences[i] < t.differences[i - 1];
  json report = base_report(cfg, "core-energy");
  report["delta"] = t.delta;
  report["eta"] = t.eta;
  report["rows"] = rows;
  report["differences"] = t.differences;
  report["differences_decreasing"] = decreasing;
  finish_report(report, ctx, start);
  return report;
}

json run_renormalized(const ExperimentConfig& cfg, const RunContext& ctx) {
  require_experiment(cfg, ExperimentKind::Renormalized);
  const auto start = Clock::now();
  const int level = single_level(cfg, "renorm");
  const Triangulation tri = build_mesh(cfg, level);
  const FrameField frames = build_frames(tri);
  const std::string off = off_text(tri);
  const std::string hash = git_blob_sha1(off);
  const LevelSolve s = solve_restarts(cfg, tri, frames, ctx.jobs);
  const DefectSet defects = detect_defects(tri, frames, s.best.field);
  const RenormalizedEstimate e =
      estimate_renormalized(tri, frames, s.best.field, defects, cfg.renorm_deltas);

  write_atomic(ctx.out / "mesh.off", off);
  write_atomic(ctx.out / "field.csv", field_text(s.best.field, hash));
  std::vector<std::vector<std::string>> csv;
  json shells = json::array();
  for (std::size_t k = 0; k < e.dyadic_shells.size(); ++k) {
    json list = json::array();
    for (const DyadicShell& sh : e.dyadic_shells[k]) {
      csv.push_back({std::to_string(k), std::to_string(sh.j), format_double(sh.energy),
                     format_double(sh.excess)});
      list.push_back({{"j", sh.j}, {"energy", sh.energy}, {"excess", sh.excess}});
    }
    shells.push_back(list);
  }
  write_csv(ctx.out / "shells.csv", "defect,j,energy,excess", csv);

  json report = base_report(cfg, "renorm");
  report["mesh_hash"] = hash;
  report["energy"] = s.best.energy;
  report["converged"] = s.best.trace.converged;
  report["defects"] = defects_json(defects);
  report["delta_values"] = e.delta_values;
  report["intrinsic_partial"] = e.intrinsic_partial;
  report["cauchy_differences"] = e.cauchy_differences;
  report["extrinsic_term"] = e.extrinsic_term;
  report["region_energy"] = e.region_energy;
  report["region_extrinsic"] = e.region_extrinsic;
  report["region_covariant"] = e.region_covariant;
  report["decomposition_residual"] = e.decomposition_residual;
  report["area_residual"] = e.area_residual;
  report["straddling_area"] = e.straddling_area;
  report["dyadic_shells"] = shells;
  report["shell_outer_energy"] = e.shell_outer_energy;
  report["shell_inner_energy"] = e.shell_inner_energy;
  finish_report(report, ctx, start);
  return report;
}

}  // namespace shellxy
