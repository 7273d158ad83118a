#include "shellxy/minimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "shellxy/error.hpp"
#include "shellxy/vorticity.hpp"

namespace shellxy {

namespace {

constexpr double kArmijo = 1e-4;

// Energy, gradient and line-search evaluations for one optimisation run.
class Objective {
 public:
  Objective(const Triangulation& tri, const FrameField& frames, std::vector<char> fixed)
      : tri_(tri), frames_(frames), fixed_(std::move(fixed)) {
    const std::size_t n = tri.num_vertices();
    v_.resize(n);
    dv_.resize(n);
    w_.resize(n);
    grad_.resize(n);
  }

  // Moves to `theta` and refreshes energy and gradient (zero at fixed vertices).
  void set(const std::vector<double>& theta) {
    kernels::parallel::realize(theta, frames_.e1, frames_.e2, v_, dv_);
    energy_ = kernels::parallel::xy_energy(tri_.edges(), tri_.stiffness(), v_);
    kernels::parallel::xy_gradient(tri_.adjacency(), tri_.stiffness(), v_, dv_, grad_);
    for (std::size_t i = 0; i < grad_.size(); ++i)
      if (fixed_[i]) grad_[i] = 0.0;
  }

  // E(theta + alpha d) - E(theta), with each displacement from half-angle identities.
  double change(const std::vector<double>& theta, const std::vector<double>& d, double alpha) {
    const auto n = static_cast<std::ptrdiff_t>(theta.size());
    const auto& e1 = frames_.e1;
    const auto& e2 = frames_.e2;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double s = alpha * d[i];
      const double mid = theta[i] + 0.5 * s;
      w_[i] = 2.0 * std::sin(0.5 * s) * (-std::sin(mid) * e1[i] + std::cos(mid) * e2[i]);
    }
    return kernels::parallel::xy_energy_change(tri_.edges(), tri_.stiffness(), v_, w_);
  }

  double energy() const { return energy_; }
  const std::vector<double>& grad() const { return grad_; }
  double grad_norm() const {
    double m = 0.0;
    for (double g : grad_) m = std::max(m, std::abs(g));
    return m;
  }

 private:
  const Triangulation& tri_;
  const FrameField& frames_;
  std::vector<char> fixed_;
  std::vector<Vec3> v_, dv_, w_;
  std::vector<double> grad_;
  double energy_ = 0.0;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double default_tolerance(const Triangulation& tri) {
  const auto& k = tri.stiffness();
  double mean = 0.0;
  for (double x : k) mean += x;
  return 1e-8 * (k.empty() ? 1.0 : mean / static_cast<double>(k.size()));
}

// Inverse of the largest row sum of |kappa|: a step that cannot overshoot on any vertex.
double base_step(const Triangulation& tri) {
  const auto& adj = tri.adjacency();
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < adj.offsets.size(); ++i) {
    double s = 0.0;
    for (int k = adj.offsets[i]; k < adj.offsets[i + 1]; ++k) s += std::abs(tri.stiffness()[adj.edge[k]]);
    worst = std::max(worst, s);
  }
  return worst > 0.0 ? 1.0 / worst : 1.0;
}

SolveResult run(const Triangulation& tri, const FrameField& frames, const DiscreteField& init,
                std::vector<char> fixed, const SolveOptions& opts) {
  if (init.theta.size() != tri.num_vertices() || frames.size() != tri.num_vertices()) {
    throw Error(ErrorCode::LengthMismatch, "initial field, frames and mesh have different lengths");
  }
  if (opts.max_iters < 1) throw Error(ErrorCode::PreconditionViolated, "max_iters must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = tri.num_vertices();
  const double tol = opts.grad_tol > 0.0 ? opts.grad_tol : default_tolerance(tri);
  const double alpha0 = base_step(tri);
  const bool all_fixed = std::all_of(fixed.begin(), fixed.end(), [](char c) { return c != 0; });

  SolveResult r;
  r.field = init;
  std::vector<double>& theta = r.field.theta;
  Objective obj(tri, frames, std::move(fixed));
  obj.set(theta);

  std::vector<double> d(n, 0.0), g_prev(n, 0.0), theta_prev(n, 0.0);
  double alpha_guess = alpha0;
  double prev_alpha_slope = 0.0;
  bool stalled = false;

  for (int it = 0;; ++it) {
    TraceRow row{it, obj.energy(), obj.grad_norm(), 0, false};
    if (opts.track_winding) {
      const Windings w = windings(tri, frames, r.field);
      row.total_winding = w.total();
      row.defect_crossing = w.ambiguous_count() > 0;
      if (row.defect_crossing) r.trace.flagged_iterations.push_back(it);
    }
    r.trace.iterates.push_back(row);
    if (opts.checkpoint && opts.checkpoint_every > 0 && it % opts.checkpoint_every == 0) {
      opts.checkpoint(it, r.field);
    }
    if (all_fixed || row.grad_norm <= tol) {
      r.trace.converged = true;
      break;
    }
    if (it >= opts.max_iters || stalled) break;

    const std::vector<double>& g = obj.grad();
    switch (opts.step_rule) {
      case StepRule::NonlinearCG: {
        double beta = 0.0;
        if (it > 0) {
          double num = 0.0;
          for (std::size_t i = 0; i < n; ++i) num += g[i] * (g[i] - g_prev[i]);
          beta = std::max(0.0, num / dot(g_prev, g_prev));
        }
        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i] + beta * d[i];
        break;
      }
      case StepRule::BarzilaiBorwein: {
        if (it > 0) {
          double ss = 0.0, sy = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const double s = theta[i] - theta_prev[i];
            ss += s * s;
            sy += s * (g[i] - g_prev[i]);
          }
          alpha_guess = sy > 0.0 ? ss / sy : alpha0;
        }
        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
        break;
      }
      case StepRule::FixedStep:
        alpha_guess = opts.fixed_step * alpha0;
        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
        break;
    }
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = dot(g, d);
    }
    if (opts.step_rule == StepRule::NonlinearCG && it > 0) alpha_guess = prev_alpha_slope / slope;
    if (!(alpha_guess > 0.0) || !std::isfinite(alpha_guess)) alpha_guess = alpha0;

    // Armijo backtracking with safeguarded quadratic interpolation, plus one expansion try.
    double alpha = alpha_guess;
    double accepted = 0.0;
    for (int k = 0; k < 60; ++k) {
      const double dE = obj.change(theta, d, alpha);
      const double denom = 2.0 * (dE - slope * alpha);
      const double quad = denom > 0.0 ? -slope * alpha * alpha / denom : 2.0 * alpha;
      if (dE <= kArmijo * alpha * slope) {
        accepted = alpha;
        if (k == 0 && quad > 1.5 * alpha) {
          const double longer = std::min(quad, 10.0 * alpha);
          const double dL = obj.change(theta, d, longer);
          if (dL <= kArmijo * longer * slope && dL < dE) accepted = longer;
        }
        break;
      }
      alpha = std::clamp(quad, 0.1 * alpha, 0.5 * alpha);
    }
    if (accepted == 0.0) {
      stalled = true;  // no decrease representable along the steepest direction either
      continue;
    }

    g_prev = g;
    theta_prev = theta;
    for (std::size_t i = 0; i < n; ++i) theta[i] += accepted * d[i];
    prev_alpha_slope = accepted * slope;
    obj.set(theta);
  }

  r.energy = obj.energy();
  r.grad_norm = obj.grad_norm();
  r.trace.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

SolveResult minimize(const Triangulation& tri, const FrameField& frames,
                     const DiscreteField& init, const SolveOptions& opts) {
  return run(tri, frames, init, std::vector<char>(tri.num_vertices(), 0), opts);
}

SolveResult minimize_dirichlet(const Triangulation& tri, const FrameField& frames,
                               const DiscreteField& init, const std::vector<int>& fixed_vertices,
                               const SolveOptions& opts) {
  if (fixed_vertices.empty()) {
    throw Error(ErrorCode::PreconditionViolated, "Dirichlet problem needs fixed vertices");
  }
  std::vector<char> fixed(tri.num_vertices(), 0);
  for (int i : fixed_vertices) fixed.at(i) = 1;
  return run(tri, frames, init, std::move(fixed), opts);
}

DiscreteField random_field(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uniform(-std::numbers::pi, std::numbers::pi);
  DiscreteField f;
  f.theta.resize(n);
  for (double& t : f.theta) t = -uniform(rng);  // [-pi, pi) mirrored onto (-pi, pi]
  return f;
}

RestartOutcome minimize_restarts(const Triangulation& tri, const FrameField& frames,
                                 const SolveOptions& opts) {
  const int count = std::max(1, opts.restarts);
  RestartOutcome out;
  out.runs.resize(count);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    out.runs[k] = minimize(tri, frames, random_field(tri.num_vertices(), opts.seed, k), opts);
  }
  for (std::size_t k = 1; k < out.runs.size(); ++k)
    if (out.runs[k].energy < out.runs[out.best].energy) out.best = k;
  return out;
}

// ---------------------------------------------------------------------------------------------
// Annulus

Vec3 AnnulusResult::sample(const Vec3& p) const {
  const Surface& S = mesh.surface();
  const Vec2 z = S.log_map(centre, basis, p);
  const double rho = std::clamp(z.norm(), ring_radii.front(), ring_radii.back());
  double phi = std::atan2(z.y(), z.x());
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  const Vec2 q = rho * Vec2(std::cos(phi), std::sin(phi));

  const int strips = static_cast<int>(ring_radii.size()) - 1;
  const int k = std::clamp(
      static_cast<int>(std::upper_bound(ring_radii.begin(), ring_radii.end(), rho) -
                       ring_radii.begin()) - 1,
      0, strips - 1);
  const int j0 = static_cast<int>(std::floor(phi / (2.0 * std::numbers::pi) * n_theta));

  int best_t = -1;
  Vec3 best_lambda = Vec3::Zero();
  double best_score = -std::numeric_limits<double>::infinity();
  for (int dj = -1; dj <= 1; ++dj) {
    const int j = ((j0 + dj) % n_theta + n_theta) % n_theta;
    for (int s = 0; s < 2; ++s) {
      const int t = 2 * (k * n_theta + j) + s;
      const Tri& T = mesh.triangles()[t];
      const Vec2 a = plane[T[0]], b = plane[T[1]], c = plane[T[2]];
      Eigen::Matrix2d M;
      M.col(0) = b - a;
      M.col(1) = c - a;
      const Vec2 l = M.inverse() * (q - a);
      const Vec3 lambda(1.0 - l.x() - l.y(), l.x(), l.y());
      if (lambda.minCoeff() > best_score) {
        best_score = lambda.minCoeff();
        best_t = t;
        best_lambda = lambda;
      }
    }
  }
  best_lambda = best_lambda.cwiseMax(0.0);
  best_lambda /= best_lambda.sum();
  const std::vector<Vec3> v = realize(field, frames);
  const Tri& T = mesh.triangles()[best_t];
  Vec3 w = best_lambda[0] * v[T[0]] + best_lambda[1] * v[T[1]] + best_lambda[2] * v[T[2]];
  const Vec3 n = S.normal(p);
  w -= w.dot(n) * n;
  return w.normalized();
}

AnnulusResult annulus_minimizer(const Surface& surface, const Vec3& centre, double delta,
                                int resolution, const SolveOptions& opts) {
  if (resolution < 64) {
    throw Error(ErrorCode::PreconditionViolated, "annulus resolution must be >= 64");
  }
  if (!(delta > 0.0) || !(delta < surface.injectivity_radius())) {
    throw Error(ErrorCode::PreconditionViolated,
                "delta must lie below the injectivity radius " +
                    std::to_string(surface.injectivity_radius()));
  }
  AnnulusResult a{.mesh = gen_polar_annulus(surface, centre, 0.5 * delta, delta, resolution)};
  a.frames = build_frames(a.mesh);
  a.centre = centre;
  a.basis = surface.frame_at(centre);
  a.n_theta = resolution;
  for (const Vec3& x : a.mesh.vertices()) a.plane.push_back(surface.log_map(centre, a.basis, x));
  for (std::size_t k = 0; k * resolution < a.mesh.num_vertices(); ++k)
    a.ring_radii.push_back(a.plane[k * resolution].norm());

  AnsatzOptions ansatz;
  ansatz.sigma = 2.0 * delta;
  const DiscreteField init = hedgehog_ansatz(a.mesh, a.frames, {{centre, 1}}, ansatz);
  SolveResult r = minimize(a.mesh, a.frames, init, opts);
  a.field = std::move(r.field);
  a.trace = std::move(r.trace);
  a.eta = r.energy;
  return a;
}

// ---------------------------------------------------------------------------------------------
// Core energy

CoreEnergyTable core_energy(const std::vector<const Triangulation*>& family, const Vec3& centre,
                            double delta, const CoreEnergyOptions& options) {
  if (family.empty()) throw Error(ErrorCode::PreconditionViolated, "empty mesh family");
  const Surface& S = family.front()->surface();
  if (!(delta > 4.0 * family.front()->mesh_size())) {
    throw Error(ErrorCode::BallTooSmall, "delta must exceed 4 eps of the coarsest mesh");
  }
  if (!(delta < S.injectivity_radius())) {
    throw Error(ErrorCode::PreconditionViolated, "delta must lie below the injectivity radius");
  }
  CoreEnergyTable table;
  table.delta = delta;
  std::optional<AnnulusResult> annulus;
  if (options.use_annulus) {
    annulus = annulus_minimizer(S, centre, delta, options.annulus_resolution);
    table.eta = annulus->eta;
  }
  AnsatzOptions ansatz;
  ansatz.sigma = 2.0 * delta;

  for (const Triangulation* mesh : family) {
    const DiscreteBall ball = discrete_ball(*mesh, centre, delta);
    const Triangulation sub = mesh->submesh(ball.triangles);
    const FrameField frames = build_frames(sub);
    DiscreteField init = hedgehog_ansatz(sub, frames, {{centre, 1}}, ansatz);
    const std::vector<int> fixed = sub.boundary_vertices();
    if (annulus) {
      for (int i : fixed) {
        const Vec3 w = annulus->sample(sub.vertices()[i]);
        init.theta[i] = std::atan2(w.dot(frames.e2[i]), w.dot(frames.e1[i]));
      }
    }
    const SolveResult r = minimize_dirichlet(sub, frames, init, fixed, options.solve);
    CoreEnergyRow row;
    row.eps = mesh->mesh_size();
    row.gamma = r.energy;
    row.remainder = r.energy - std::numbers::pi * std::log(delta / row.eps);
    row.converged = r.trace.converged;
    row.interior_winding = windings(sub, frames, r.field).total();
    table.rows.push_back(row);
  }
  for (std::size_t k = 1; k < table.rows.size(); ++k)
    table.differences.push_back(std::abs(table.rows[k].remainder - table.rows[k - 1].remainder));
  return table;
}

}  // namespace shellxy
