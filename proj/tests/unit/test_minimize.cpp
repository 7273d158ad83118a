#include <algorithm>
#include <cmath>
#include <numbers>

#include "shellxy/energy.hpp"
#include "shellxy/minimize.hpp"
#include "shellxy/vorticity.hpp"
#include "support.hpp"

using namespace shellxy;

namespace {

constexpr double kPi = std::numbers::pi;

SolveOptions quick(int max_iters = 5000) {
  SolveOptions o;
  o.max_iters = max_iters;
  return o;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(Minimize, DescendsToACriticalPoint) {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 3);
  const FrameField f = build_frames(m);
  const DiscreteField init = random_field(m.num_vertices(), 5);
  const SolveResult r = minimize(m, f, init, quick(20000));
  ASSERT_TRUE(r.trace.converged);
  EXPECT_LT(r.energy, xy_energy(m, f, init));
  EXPECT_EQ(r.energy, xy_energy(m, f, r.field));
  EXPECT_NEAR(r.grad_norm, max_abs(xy_gradient(m, f, r.field)), 1e-15);
  double mean_kappa = 0.0;
  for (double k : m.stiffness()) mean_kappa += k / m.num_edges();
  EXPECT_LE(r.grad_norm, 1e-8 * mean_kappa);
  // Accepted steps decrease the energy; recomputed totals may differ by rounding.
  for (std::size_t k = 1; k < r.trace.iterates.size(); ++k)
    EXPECT_LE(r.trace.iterates[k].energy, r.trace.iterates[k - 1].energy * (1 + 1e-12));
  EXPECT_EQ(detect_defects(m, f, r.field).empty(), false);
}

TEST(Minimize, EveryStepRuleConverges) {
  const Triangulation g = gen_planar_grid(Surface::plane(), 12, 1.0);
  const FrameField f = build_frames(g);
  const DiscreteField init = random_field(g.num_vertices(), 3);
  for (StepRule rule : {StepRule::FixedStep, StepRule::BarzilaiBorwein, StepRule::NonlinearCG}) {
    SolveOptions o = quick(50000);
    o.step_rule = rule;
    const SolveResult r = minimize(g, f, init, o);
    EXPECT_TRUE(r.trace.converged);
    EXPECT_LT(r.energy, xy_energy(g, f, init));
  }
}

TEST(Minimize, IsDeterministic) {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 3);
  const FrameField f = build_frames(m);
  const DiscreteField init = random_field(m.num_vertices(), 8);
  const SolveResult a = minimize(m, f, init, quick());
  const SolveResult b = minimize(m, f, init, quick());
  EXPECT_EQ(a.field.theta, b.field.theta);
  EXPECT_EQ(a.trace.iterates.size(), b.trace.iterates.size());
}

TEST(Minimize, RandomFields) {
  const DiscreteField a = random_field(1000, 42, 0);
  EXPECT_EQ(a.theta, random_field(1000, 42, 0).theta);
  EXPECT_NE(a.theta, random_field(1000, 42, 1).theta);
  EXPECT_NE(a.theta, random_field(1000, 43, 0).theta);
  for (double t : a.theta) {
    EXPECT_GT(t, -kPi);
    EXPECT_LE(t, kPi);
  }
}

TEST(Minimize, RestartsPickTheLowestEnergy) {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 2);
  const FrameField f = build_frames(m);
  SolveOptions o = quick();
  o.restarts = 4;
  o.seed = 17;
  const RestartOutcome a = minimize_restarts(m, f, o);
  ASSERT_EQ(a.runs.size(), 4u);
  for (const SolveResult& r : a.runs) EXPECT_GE(r.energy, a.runs[a.best].energy);
  const SolveResult single = minimize(m, f, random_field(m.num_vertices(), 17, 2), o);
  EXPECT_EQ(single.field.theta, a.runs[2].field.theta);
  EXPECT_EQ(minimize_restarts(m, f, o).runs[a.best].field.theta, a.runs[a.best].field.theta);
}

TEST(Minimize, TracksWindingAndCheckpoints) {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 3);
  const FrameField f = build_frames(m);
  SolveOptions o = quick();
  o.track_winding = true;
  o.checkpoint_every = 10;
  std::vector<int> seen;
  o.checkpoint = [&](int it, const DiscreteField& u) {
    EXPECT_EQ(u.theta.size(), m.num_vertices());
    seen.push_back(it);
  };
  const SolveResult r = minimize(m, f, random_field(m.num_vertices(), 1), o);
  for (const TraceRow& row : r.trace.iterates) EXPECT_EQ(row.total_winding, 2);
  ASSERT_FALSE(seen.empty());
  for (std::size_t k = 0; k < seen.size(); ++k) EXPECT_EQ(seen[k], static_cast<int>(10 * k));
}

TEST(Minimize, Preconditions) {
  const Triangulation g = gen_planar_grid(Surface::plane(), 4, 1.0);
  const FrameField f = build_frames(g);
  const DiscreteField init = random_field(g.num_vertices(), 0);
  EXPECT_ERROR(minimize(g, f, init, quick(0)), ErrorCode::PreconditionViolated);
  EXPECT_ERROR(minimize_dirichlet(g, f, init, {}, quick()), ErrorCode::PreconditionViolated);
  EXPECT_ERROR(minimize(g, f, DiscreteField{{0.0}}, quick()), ErrorCode::LengthMismatch);
  std::vector<int> all(g.num_vertices());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  const SolveResult r = minimize_dirichlet(g, f, init, all, quick());
  EXPECT_TRUE(r.trace.converged);
  EXPECT_EQ(r.field.theta, init.theta);
  EXPECT_EQ(r.trace.iterates.back().iteration, 0);
}

TEST(Minimize, DirichletKeepsTheBoundaryBitExact) {
  const Triangulation g = gen_planar_grid(Surface::plane(), 16, 1.0);
  const FrameField f = build_frames(g);
  const DiscreteField init = random_field(g.num_vertices(), 12);
  const std::vector<int> boundary = g.boundary_vertices();
  const SolveResult r = minimize_dirichlet(g, f, init, boundary, quick(20000));
  for (int i : boundary) EXPECT_EQ(r.field.theta[i], init.theta[i]);
  const std::vector<double> grad = xy_gradient(g, f, r.field);
  std::vector<char> fixed(g.num_vertices(), 0);
  for (int i : boundary) fixed[i] = 1;
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!fixed[i] && r.trace.converged) EXPECT_LT(std::abs(grad[i]), 1e-6);
}

TEST(Minimize, ConstantBoundaryGivesAConstantField) {
  const Triangulation g = gen_planar_grid(Surface::plane(), 12, 1.0);
  const FrameField f = build_frames(g);
  DiscreteField init = random_field(g.num_vertices(), 4);
  const std::vector<int> boundary = g.boundary_vertices();
  for (int i : boundary) init.theta[i] = 0.3;
  const SolveResult r = minimize_dirichlet(g, f, init, boundary, quick(20000));
  ASSERT_TRUE(r.trace.converged);
  EXPECT_LT(r.energy, 1e-10);
}

TEST(Minimize, DegreeOneBoundaryKeepsOneVortex) {
  const Triangulation g = gen_planar_grid(Surface::plane(), 32, 1.0);
  const FrameField f = build_frames(g);
  DiscreteField init = random_field(g.num_vertices(), 6, 0);
  const std::vector<int> boundary = g.boundary_vertices();
  for (int i : boundary) init.theta[i] = std::atan2(g.vertices()[i].y(), g.vertices()[i].x());
  const SolveResult r = minimize_dirichlet(g, f, init, boundary, quick(50000));
  ASSERT_TRUE(r.trace.converged);
  const DefectSet d = detect_defects(g, f, r.field);
  int total = 0;
  for (const Defect& x : d) total += x.charge;
  EXPECT_EQ(total, 1);
  EXPECT_EQ(windings(g, f, r.field).total(), 1);
}

TEST(Minimize, PlanarAnnulusMinimiser) {
  // On a flat annulus the hedgehog is the minimiser: eta = pi log 2.
  const Surface P = Surface::plane();
  const AnnulusResult a = annulus_minimizer(P, Vec3::Zero(), 0.5, 128);
  EXPECT_TRUE(a.trace.converged);
  EXPECT_NEAR(a.eta, kPi * std::log(2.0), 2e-3);
  const Vec3 s = a.sample(Vec3(0.3, 0.4, 0.0));
  EXPECT_LT((s - Vec3(0.6, 0.8, 0.0)).norm(), 1e-3);
  EXPECT_NEAR(a.sample(Vec3(0.01, 0.0, 0.0)).x(), 1.0, 1e-3);  // clamped into the annulus
  EXPECT_ERROR(annulus_minimizer(P, Vec3::Zero(), 0.5, 32), ErrorCode::PreconditionViolated);
  EXPECT_ERROR(annulus_minimizer(Surface::sphere(1), Vec3(0, 0, 1), 4.0, 64),
               ErrorCode::PreconditionViolated);
}

TEST(Minimize, CoreEnergyPreconditions) {
  const Surface S = Surface::sphere(1);
  const Triangulation coarse = gen_icosphere(S, 2);
  CoreEnergyOptions o;
  o.use_annulus = false;
  EXPECT_ERROR(core_energy({&coarse}, Vec3(0, 0, 1), 2 * coarse.mesh_size(), o),
               ErrorCode::BallTooSmall);
  EXPECT_ERROR(core_energy({&coarse}, Vec3(0, 0, 1), 4.0, o), ErrorCode::PreconditionViolated);
}

TEST(Minimize, CoreEnergyOnAFlatDisc) {
  const Surface P = Surface::plane();
  const Triangulation g16 = gen_planar_grid(P, 16, 1.0);
  const Triangulation g32 = gen_planar_grid(P, 32, 1.0);
  CoreEnergyOptions o;
  o.annulus_resolution = 128;
  const CoreEnergyTable t = core_energy({&g16, &g32}, Vec3::Zero(), 0.8, o);
  ASSERT_EQ(t.rows.size(), 2u);
  ASSERT_EQ(t.differences.size(), 1u);
  for (const CoreEnergyRow& r : t.rows) {
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.interior_winding, 1);
    EXPECT_NEAR(r.remainder, r.gamma - kPi * std::log(0.8 / r.eps), 1e-12);
  }
  EXPECT_NEAR(t.differences[0], std::abs(t.rows[1].remainder - t.rows[0].remainder), 1e-15);
}
