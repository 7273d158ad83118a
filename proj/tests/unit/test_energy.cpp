#include <cmath>
#include <numbers>
#include <random>

#include "shellxy/energy.hpp"
#include "support.hpp"

using namespace shellxy;

namespace {

constexpr double kPi = std::numbers::pi;

DiscreteField random_angles(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-kPi, kPi);
  DiscreteField u;
  for (std::size_t i = 0; i < n; ++i) u.theta.push_back(U(rng));
  return u;
}

// 1/2 int |grad v_hat|^2 for a flat mesh, triangle by triangle from the affine interpolant.
double p1_dirichlet(const Triangulation& tri, const std::vector<Vec3>& v) {
  double s = 0.0;
  for (const Tri& T : tri.triangles()) {
    const Vec3 x[3] = {tri.vertices()[T[0]], tri.vertices()[T[1]], tri.vertices()[T[2]]};
    const Vec3 n2 = (x[1] - x[0]).cross(x[2] - x[0]);
    const Vec3 n = n2.normalized();
    Eigen::Matrix3d grad = Eigen::Matrix3d::Zero();  // columns: d/dx of each component
    for (int c = 0; c < 3; ++c)
      grad += v[T[c]] * (n.cross(x[(c + 2) % 3] - x[(c + 1) % 3]) / n2.norm()).transpose();
    s += 0.5 * grad.squaredNorm() * 0.5 * n2.norm();
  }
  return s;
}

// Torus densities of the normalised major-angle field, integrated in closed form over the
// major angle and by composite Simpson over the minor angle.
double torus_integral(double R, double r, double (*weight)(double)) {
  const int n = 2000;
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = 2 * kPi * k / n;
    const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
    s += w * weight(t) / (R + r * std::cos(t));
  }
  return 2 * kPi * r * s * (2 * kPi / n) / 3;
}

}  // namespace

TEST(Energy, TwoTriangleHandComputation) {
  const Triangulation m = Triangulation::build(
      Surface::plane(), {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)},
      {{0, 1, 2}, {0, 2, 3}});
  const FrameField f = build_frames(m);
  // Legs carry kappa 1/2, the diagonal 0; |v_a - v_b|^2 = 2 - 2 cos(dtheta).
  const DiscreteField u{{0.0, kPi / 2, kPi, 0.0}};
  const double expected = 0.5 * 0.5 * (2.0 + 2.0 + 4.0 + 0.0);
  EXPECT_NEAR(xy_energy(m, f, u), expected, 1e-14);
}

TEST(Energy, EqualsInterpolantDirichletIntegralOnFlatMeshes) {
  const Triangulation m = gen_planar_grid(Surface::plane(), 12, 1.0);
  const FrameField f = build_frames(m);
  const DiscreteField u = random_angles(m.num_vertices(), 4);
  const std::vector<Vec3> v = realize(u, f);
  const double oracle = p1_dirichlet(m, v);
  EXPECT_NEAR(xy_energy(m, f, u), oracle, 1e-12 * oracle);
  double sum = 0.0;
  for (double e : triangle_energies(m, v)) sum += e;
  EXPECT_NEAR(sum, oracle, 1e-12 * oracle);
}

TEST(Energy, RegionEnergiesAddUp) {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 2);
  const FrameField f = build_frames(m);
  const DiscreteField u = random_angles(m.num_vertices(), 9);
  std::vector<int> a, b;
  for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) (t % 3 ? a : b).push_back(t);
  const double total = xy_energy(m, f, u);
  EXPECT_NEAR(xy_energy(m, f, u, a) + xy_energy(m, f, u, b), total, 1e-12 * total);
  const EnergyBreakdown br = energy_breakdown(m, f, u, 2, {{"a", a}, {"b", b}});
  EXPECT_EQ(br.total, total);
  EXPECT_NEAR(br.per_region.at("a") + br.per_region.at("b"), total, 1e-12 * total);
  EXPECT_NEAR(br.renormalized_remainder, total - 2 * kPi * std::log(1 / m.mesh_size()), 1e-12);
}

TEST(Energy, GradientMatchesFiniteDifferences) {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 2);
  const FrameField f = build_frames(m);
  const DiscreteField u = random_angles(m.num_vertices(), 1);
  const std::vector<double> g = xy_gradient(m, f, u);
  const std::vector<Vec3> v = realize(u, f);
  const double h = 1e-6;
  for (int i : {0, 7, 41, 100, 161}) {
    // Only edges at vertex i change, so difference those to avoid cancellation.
    auto local = [&](double t) {
      const Vec3 vi = std::cos(t) * f.e1[i] + std::sin(t) * f.e2[i];
      double s = 0.0;
      for (std::size_t e = 0; e < m.num_edges(); ++e) {
        const auto [a, b] = m.edges()[e];
        if (a == i) s += m.stiffness()[e] * (vi - v[b]).squaredNorm();
        if (b == i) s += m.stiffness()[e] * (v[a] - vi).squaredNorm();
      }
      return 0.5 * s;
    };
    const double fd = (local(u.theta[i] + h) - local(u.theta[i] - h)) / (2 * h);
    EXPECT_NEAR(g[i], fd, 1e-7 * (1 + std::abs(fd)));
  }
}

TEST(Energy, InvariantUnderGlobalRotationAndFrameChoice) {
  const Triangulation g = gen_planar_grid(Surface::plane(), 10, 1.0);
  const FrameField fg = build_frames(g);
  DiscreteField u = random_angles(g.num_vertices(), 2);
  const double e0 = xy_energy(g, fg, u);
  for (double& t : u.theta) t += 0.77;
  EXPECT_NEAR(xy_energy(g, fg, u), e0, 1e-12 * e0);

  // The same vectors expressed in frames built from a different axis.
  const Triangulation m = gen_icosphere(Surface::sphere(1), 3);
  const FrameField fa = build_frames(m);
  const FrameField fb = build_frames(m, Vec3(0.3, -0.5, 0.8).normalized());
  const DiscreteField ua = hedgehog_ansatz(m, fa, {{Vec3(0, 0, 1), 1}, {Vec3(0, 0, -1), 1}});
  const std::vector<Vec3> v = realize(ua, fa);
  DiscreteField ub;
  for (std::size_t i = 0; i < v.size(); ++i)
    ub.theta.push_back(std::atan2(v[i].dot(fb.e2[i]), v[i].dot(fb.e1[i])));
  const double ea = xy_energy(m, fa, ua);
  EXPECT_NEAR(xy_energy(m, fb, ub), ea, 1e-12 * ea);
}

TEST(Energy, PlanarHedgehogOnAnAnnulus) {
  // 1/2 int |grad(z/|z|)|^2 over 0.01 <= |z| <= 1 is pi log 100.
  const Surface P = Surface::plane();
  const Triangulation m = gen_polar_annulus(P, Vec3::Zero(), 0.01, 1.0, 256);
  const FrameField f = build_frames(m);
  const DiscreteField u = restrict_smooth(m, f, [](const Vec3& p) { return p; });
  const double exact = kPi * std::log(100.0);
  EXPECT_LT(std::abs(xy_energy(m, f, u) - exact) / exact, 0.03);
}

TEST(Energy, TorusContinuumEnergies) {
  const Surface T = Surface::torus(2, 0.5);
  const double cov = torus_integral(2, 0.5, [](double t) { return std::sin(t) * std::sin(t); });
  const double shape = torus_integral(2, 0.5, [](double t) { return std::cos(t) * std::cos(t); });
  const TangentField c = canonical_field(T);
  EXPECT_NEAR(cov + shape, 4 * kPi * kPi * 0.5 / std::sqrt(3.75), 1e-9);
  EXPECT_NEAR(extrinsic_energy(T, c, 256, EnergyWeighting::NematicShell), cov + 0.5 * shape, 1e-5);
  EXPECT_NEAR(extrinsic_energy(T, c, 256, EnergyWeighting::FullSurfaceGradient), cov + shape, 1e-5);
  EXPECT_NEAR(extrinsic_energy(T, c, 256, EnergyWeighting::HalfSurfaceGradient),
              0.5 * (cov + shape), 1e-5);
  EXPECT_ERROR(extrinsic_energy(T, c, 16), ErrorCode::QuadratureTooCoarse);
  EXPECT_ERROR(extrinsic_energy(Surface::sphere(1), c, 64), ErrorCode::HairyBallUnsupported);
}

TEST(Energy, FlatCanonicalFieldCostsNothing) {
  const Surface P = Surface::plane(2.0);
  EXPECT_NEAR(extrinsic_energy(P, canonical_field(P), 32), 0.0, 1e-12);
}

TEST(Energy, RenormalizedRemainder) {
  EXPECT_DOUBLE_EQ(renormalized_remainder(10.0, 0.1, 2), 10.0 - 2 * kPi * std::log(10.0));
  EXPECT_EQ(renormalized_remainder(3.0, 0.5, 0), 3.0);
  EXPECT_ERROR(renormalized_remainder(1.0, 0.0, 1), ErrorCode::PreconditionViolated);
}
