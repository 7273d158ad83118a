// One PASS/FAIL line per acceptance criterion. Usage: shellxy_acceptance [AC1 ... AC11]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shellxy/energy.hpp"
#include "shellxy/experiments.hpp"
#include "shellxy/io.hpp"
#include "shellxy/minimize.hpp"
#include "shellxy/vorticity.hpp"

using namespace shellxy;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("shellxy_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig config(const std::string& file) {
  return load_config(fs::path(SHELLXY_CONFIG_DIR) / file);
}

// Test-side integral of grad f . grad g of the affine interpolants, triangle by triangle.
double affine_pairing(const Triangulation& tri, const std::vector<double>& f,
                      const std::vector<double>& g) {
  double s = 0.0;
  for (const Tri& T : tri.triangles()) {
    const Vec3 x[3] = {tri.vertices()[T[0]], tri.vertices()[T[1]], tri.vertices()[T[2]]};
    const Vec3 n2 = (x[1] - x[0]).cross(x[2] - x[0]);
    const Vec3 n = n2.normalized();
    Vec3 gf = Vec3::Zero(), gg = Vec3::Zero();
    for (int c = 0; c < 3; ++c) {
      const Vec3 grad = n.cross(x[(c + 2) % 3] - x[(c + 1) % 3]) / n2.norm();
      gf += f[T[c]] * grad;
      gg += g[T[c]] * grad;
    }
    s += gf.dot(gg) * 0.5 * n2.norm();
  }
  return s;
}

Outcome ac1() {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 4);
  std::mt19937_64 rng(101);
  std::normal_distribution<double> N;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> f(m.num_vertices()), g(m.num_vertices());
    for (auto& x : f) x = N(rng);
    for (auto& x : g) x = N(rng);
    double kappa_sum = 0.0;
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
      const auto [a, b] = m.edges()[e];
      kappa_sum += m.stiffness()[e] * (f[a] - f[b]) * (g[a] - g[b]);
    }
    const double exact = affine_pairing(m, f, g);
    worst = std::max(worst, std::abs(kappa_sum - exact) / std::abs(exact));
  }
  return {worst < 1e-10, fmt("max relative error %.3e (< 1e-10) over 10 pairs", worst)};
}

Outcome ac2() {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 4);
  const FrameField f = build_frames(m);
  const DiscreteField u = random_field(m.num_vertices(), 202);
  const std::vector<double> grad = xy_gradient(m, f, u);
  const std::vector<Vec3> v = realize(u, f);
  std::mt19937_64 rng(203);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(m.num_vertices()) - 1);
  const double h = 1e-6;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int i = pick(rng);
    // Energy of the edges at i; the rest of the sum does not depend on theta_i.
    auto local = [&](double t) {
      const Vec3 vi = std::cos(t) * f.e1[i] + std::sin(t) * f.e2[i];
      double s = 0.0;
      const auto& adj = m.adjacency();
      for (int q = adj.offsets[i]; q < adj.offsets[i + 1]; ++q)
        s += m.stiffness()[adj.edge[q]] * (vi - v[adj.neighbour[q]]).squaredNorm();
      return 0.5 * s;
    };
    const double fd = (local(u.theta[i] + h) - local(u.theta[i] - h)) / (2 * h);
    worst = std::max(worst, std::abs(grad[i] - fd) / std::max(std::abs(fd), 1e-3));
  }
  return {worst < 1e-6, fmt("max relative error %.3e (< 1e-6) at 100 vertices", worst)};
}

// Midpoint rule on an n x n parameter grid.
std::pair<double, double> curvature_integrals(const Surface& S, int n) {
  const Vec2 per = S.parameter_periods();
  double total = 0.0, absolute = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = (i + 0.5) * per.x() / n, w = (j + 0.5) * per.y() / n;
      const double dA = S.chart_du(u, w).cross(S.chart_dv(u, w)).norm() * per.x() * per.y() / n / n;
      const double G = S.gauss_curvature(S.chart(u, w));
      total += G * dA;
      absolute += std::abs(G) * dA;
    }
  return {total, absolute};
}

Outcome ac3() {
  const auto [gs, abs_s] = curvature_integrals(Surface::sphere(1.5), 400);
  const auto [gt, abs_t] = curvature_integrals(Surface::torus(2, 0.5), 400);
  const double err_s = std::abs(gs - 4 * kPi) / (4 * kPi);
  // chi = 0: measured against the total absolute curvature.
  const double err_t = std::abs(gt) / abs_t;
  return {err_s < 5e-3 && err_t < 5e-3,
          fmt("sphere %.9f vs 4pi (rel %.2e), torus %.3e (rel to int|G| %.2e), limit 0.5%%", gs,
              err_s, gt, err_t)};
}

Outcome ac4() {
  std::vector<Triangulation> meshes;
  const Surface S = Surface::sphere(1);
  const Surface T = Surface::torus(2, 0.5);
  for (int L = 0; L <= 4; ++L) meshes.push_back(gen_icosphere(S, L));
  for (int n : {1, 4, 16}) meshes.push_back(gen_cubed_sphere(S, n));
  meshes.push_back(gen_uv_sphere(S, 16, 8));
  meshes.push_back(gen_torus_mesh(T, 12, 3));
  meshes.push_back(gen_torus_mesh(T, 64, 16));
  double worst = 0.0;
  for (const Triangulation& m : meshes) {
    const FrameField f = build_frames(m);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      double s = 0.0;
      for (double mu : mu_hat(m, realize(random_field(m.num_vertices(), seed), f))) s += mu;
      worst = std::max(worst, std::abs(s));
    }
  }
  return {worst < 1e-9, fmt("max |sum mu_hat| %.3e (< 1e-9) over %zu closed meshes x 10 seeds",
                            worst, meshes.size())};
}

Outcome ac5() {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 5);
  const FrameField f = build_frames(m);
  SolveOptions o;
  o.max_iters = 60000;
  o.restarts = 8;
  o.seed = 2024;
  const RestartOutcome r = minimize_restarts(m, f, o);
  int converged = 0, good = 0;
  std::string counts;
  for (const SolveResult& s : r.runs) {
    if (!s.trace.converged) {
      counts += " -";
      continue;
    }
    ++converged;
    const DefectSet d = detect_defects(m, f, s.field);
    int total = 0;
    bool unit = true;
    for (const Defect& x : d) {
      total += x.charge;
      unit = unit && std::abs(x.charge) == 1;
    }
    good += total == 2 && unit;
    counts += " " + std::to_string(d.size());
  }
  return {converged > 0 && good == converged,
          fmt("%d/8 converged, %d with sum d = 2 and all |d| = 1; defect counts:%s; best E %.4f",
              converged, good, counts.c_str(), r.runs[r.best].energy)};
}

Outcome ac6() {
  const json sphere = run_scaling(config("sphere_scaling.json"), {.out = scratch("ac6_sphere"), .jobs = 4});
  const json torus = run_scaling(config("torus_scaling.json"), {.out = scratch("ac6_torus"), .jobs = 4});
  if (sphere.at("slope").is_null() || torus.at("slope").is_null()) {
    return {false, "too few converged levels to fit a slope"};
  }
  const double ss = sphere.at("slope"), ts = torus.at("slope");
  const bool all = sphere.at("fitted_levels") == 4 && torus.at("fitted_levels") == 3;
  const double rel = std::abs(ss - 2 * kPi) / (2 * kPi);
  return {all && rel < 0.15 && std::abs(ts) < 0.5,
          fmt("sphere slope %.4f vs 2pi (rel %.3f < 0.15), torus slope %.4f (|.| < 0.5), "
              "all levels converged: %s",
              ss, rel, ts, all ? "yes" : "no")};
}

Outcome ac7() {
  Outcome out{true, ""};
  for (const char* file : {"plane_core_energy.json", "cubed_core_energy.json"}) {
    const json r = run_core_energy(config(file), {.out = scratch(std::string("ac7_") + file), .jobs = 1});
    const std::vector<double> d = r.at("differences");
    bool converged = true;
    for (const auto& row : r.at("rows")) converged = converged && row.at("converged").get<bool>();
    const bool ok = r.at("differences_decreasing").get<bool>() && converged;
    out.pass = out.pass && ok;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += fmt("%s |dr| = %.4f, %.4f%s", file, d.at(0), d.at(1), ok ? "" : " (not decreasing)");
  }
  return out;
}

Outcome ac8() {
  const AnnulusResult a = annulus_minimizer(Surface::plane(), Vec3::Zero(), 0.5, 256);
  const double target = kPi * std::log(2.0);
  const double rel = std::abs(a.eta - target) / target;
  return {a.trace.converged && rel < 0.01,
          fmt("eta %.7f vs pi log 2 = %.7f (rel %.2e < 1e-2)", a.eta, target, rel)};
}

Outcome ac9() {
  const Surface T = Surface::torus(2, 0.5);
  const double continuum = extrinsic_energy(T, canonical_field(T), 512, EnergyWeighting::HalfSurfaceGradient);
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    const Triangulation m = gen_torus_mesh(T, 4 * n, n);
    const FrameField f = build_frames(m);
    err.push_back(std::abs(xy_energy(m, f, restrict_smooth(m, f, canonical_field(T))) - continuum));
  }
  const double r1 = err[0] / err[1], r2 = err[1] / err[2];
  return {r1 >= 1.5 && r2 >= 1.5,
          fmt("continuum %.6f; errors %.3e, %.3e, %.3e; ratios %.2f, %.2f (>= 1.5)", continuum,
              err[0], err[1], err[2], r1, r2)};
}

Outcome ac10() {
  const Surface S = Surface::sphere(1);
  auto constant = [&](const Triangulation& m) {
    const FrameField f = build_frames(m);
    const DiscreteField u = hedgehog_ansatz(m, f, {{Vec3(0, 0, 1), 1}, {Vec3(0, 0, -1), 1}});
    return interpolant_bounds(m, realize(u, f)).gl_constant;
  };
  const double c4 = constant(gen_icosphere(S, 4)), c5 = constant(gen_icosphere(S, 5));
  const double q32 = constant(gen_cubed_sphere(S, 32)), q64 = constant(gen_cubed_sphere(S, 64));
  const double r_ico = std::max(c4, c5) / std::min(c4, c5);
  const double r_cub = std::max(q32, q64) / std::min(q32, q64);
  return {r_ico <= 2 && r_cub <= 2 && c4 > 0 && q32 > 0,
          fmt("icosphere C %.5f -> %.5f (ratio %.3f), cubed sphere C %.5f -> %.5f (ratio %.3f), "
              "limit 2",
              c4, c5, r_ico, q32, q64, r_cub)};
}

// Removes timing fields before comparing JSON artifacts.
void strip_timing(json& j) {
  if (j.is_object()) {
    j.erase("wall_time");
    for (auto& [k, v] : j.items()) strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

std::map<std::string, std::string> artifacts(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::string text = read_text(e.path());
    if (e.path().extension() == ".json") {
      json j = json::parse(text);
      strip_timing(j);
      text = j.dump();
    }
    out[fs::relative(e.path(), root).string()] = text;
  }
  return out;
}

Outcome ac11() {
  const fs::path dir = scratch("ac11");
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << R"({
  "schema": 1,
  "experiment": "minimize",
  "seed": 11,
  "output": "unused",
  "surface": {"kind": "sphere", "radius": 1.0},
  "mesh": {"generator": "icosphere", "levels": [3]},
  "init": {"strategy": "random"},
  "solve": {"max_iters": 20000, "restarts": 3, "track_winding": true}
})";
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* name : {"a", "b"}) {
    const fs::path out = dir / name;
    const std::string cmd = std::string("\"") + SHELLXY_CLI + "\" minimize --config \"" +
                            (dir / "config.json").string() + "\" --out \"" + out.string() +
                            "\" --jobs 2 --checkpoint-every 100 > \"" + (dir / name).string() +
                            ".log\" 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "CLI run failed: " + cmd};
    runs.push_back(artifacts(out));
  }
  std::string differing;
  for (const auto& [name, text] : runs[0]) {
    auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != text) differing += " " + name;
  }
  if (runs[0].size() != runs[1].size()) differing += " (file sets differ)";
  return {differing.empty() && runs[0].size() > 6,
          differing.empty() ? fmt("%zu artifacts byte-identical across two CLI runs", runs[0].size())
                            : "differing:" + differing};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"AC1", 5, ac1},   {"AC2", 10, ac2},   {"AC3", 5, ac3},    {"AC4", 5, ac4},
      {"AC5", 600, ac5}, {"AC6", 1800, ac6}, {"AC7", 1200, ac7}, {"AC8", 60, ac8},
      {"AC9", 300, ac9}, {"AC10", 120, ac10}, {"AC11", 300, ac11}};
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.name) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s %s %s [%.1f s, budget %.0f s%s]\n", c.name.c_str(), pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
