#include <cmath>
#include <numbers>
#include <sstream>

#include "shellxy/field.hpp"
#include "shellxy/vorticity.hpp"
#include "support.hpp"

using namespace shellxy;

namespace {

constexpr double kPi = std::numbers::pi;

double angle_diff(double a, double b) { return std::remainder(a - b, 2 * kPi); }

}  // namespace

TEST(Field, FramesAreOrthonormalAndFollowTheAxis) {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 3);
  const FrameField f = build_frames(m);
  ASSERT_EQ(f.size(), m.num_vertices());
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_NEAR(f.e1[i].norm(), 1.0, 1e-12);
    EXPECT_LT((f.e1[i].cross(f.e2[i]) - f.normal[i]).norm(), 1e-12);
    EXPECT_LT((f.normal[i] - m.vertices()[i]).norm(), 1e-12);
    const Vec3 x = Vec3::UnitX() - f.normal[i].x() * f.normal[i];
    if (x.norm() > 1e-3) EXPECT_LT((f.e1[i] - x.normalized()).norm(), 1e-12);
  }
}

TEST(Field, FramesFallBackAtTheAxis) {
  // Vertices of the cubed sphere include (1,1,1)/sqrt3 but the x-axis goes through no vertex;
  // use the z-axis where the icosphere has no vertex either, so build a fixture that has one.
  const Triangulation m = gen_uv_sphere(Surface::sphere(1), 8, 4);
  const FrameField f = build_frames(m, Vec3::UnitZ());
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_NEAR(f.e1[i].norm(), 1.0, 1e-12);
    EXPECT_NEAR(f.e1[i].dot(f.normal[i]), 0.0, 1e-12);
  }
}

TEST(Field, RealizeGivesUnitTangentVectors) {
  const Triangulation m = gen_torus_mesh(Surface::torus(2, 0.5), 32, 8);
  const FrameField f = build_frames(m);
  DiscreteField u;
  for (std::size_t i = 0; i < m.num_vertices(); ++i) u.theta.push_back(0.37 * i);
  const std::vector<Vec3> v = realize(u, f);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_NEAR(v[i].norm(), 1.0, 1e-12);
    EXPECT_NEAR(v[i].dot(f.normal[i]), 0.0, 1e-12);
  }
  EXPECT_ERROR(realize(DiscreteField{{0.0}}, f), ErrorCode::LengthMismatch);
}

TEST(Field, RestrictSmoothRoundTrip) {
  const Surface T = Surface::torus(2, 0.5);
  const Triangulation m = gen_torus_mesh(T, 32, 8);
  const FrameField f = build_frames(m);
  const TangentField c = canonical_field(T);
  const std::vector<Vec3> v = realize(restrict_smooth(m, f, c), f);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_LT((v[i] - c(m.vertices()[i])).norm(), 1e-12);
  EXPECT_ERROR(restrict_smooth(m, f, [](const Vec3&) { return Vec3::Zero(); }),
               ErrorCode::VanishingField);
  EXPECT_ERROR(canonical_field(Surface::sphere(1)), ErrorCode::HairyBallUnsupported);
  const Triangulation uv = gen_uv_sphere(Surface::sphere(1), 8, 4);  // has both poles
  EXPECT_ERROR(restrict_smooth(uv, build_frames(uv), longitude_field(Surface::sphere(1))),
               ErrorCode::VanishingField);
}

TEST(Field, InterpolantIsAffine) {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 1);
  const FrameField f = build_frames(m);
  DiscreteField u;
  for (std::size_t i = 0; i < m.num_vertices(); ++i) u.theta.push_back(std::sin(1.0 + i));
  const std::vector<Vec3> v = realize(u, f);
  const Tri& T = m.triangles()[5];
  EXPECT_EQ(interpolant_eval(m, v, 5, Vec3(0, 1, 0)), v[T[1]]);
  const Vec3 mid = interpolant_eval(m, v, 5, Vec3(0.2, 0.3, 0.5));
  EXPECT_LT((mid - (0.2 * v[T[0]] + 0.3 * v[T[1]] + 0.5 * v[T[2]])).norm(), 1e-15);
  EXPECT_ERROR(interpolant_eval(m, v, 5, Vec3(0.5, 0.6, -0.1)), ErrorCode::BadBarycentric);
  EXPECT_ERROR(interpolant_eval(m, v, 5, Vec3(0.5, 0.6, 0.1)), ErrorCode::BadBarycentric);
}

TEST(Field, TransportOfAParallelFieldIsSmall) {
  // The canonical torus field has a bounded covariant derivative, so transported edge angle
  // differences shrink linearly with the mesh.
  const Surface T = Surface::torus(2, 0.5);
  double previous = 1e9;
  for (int n : {8, 16, 32}) {
    const Triangulation m = gen_torus_mesh(T, 4 * n, n);
    const FrameField f = build_frames(m);
    const DiscreteField u = restrict_smooth(m, f, canonical_field(T));
    const std::vector<double> tau = edge_transport(m, f);
    double worst = 0.0;
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
      const auto [a, b] = m.edges()[e];
      worst = std::max(worst, std::abs(angle_diff(u.theta[b] - u.theta[a] + tau[e], 0.0)));
    }
    EXPECT_LT(worst, 0.6 * previous);
    previous = worst;
  }
}

TEST(Field, TransportOnAFlatSurfaceIsZero) {
  const Triangulation m = gen_planar_grid(Surface::plane(), 6, 1.0);
  for (double tau : edge_transport(m, build_frames(m))) EXPECT_EQ(tau, 0.0);
}

TEST(Field, AnsatzPlacesTheRequestedDefects) {
  const Surface S = Surface::sphere(1);
  const Triangulation m = gen_icosphere(S, 5);
  const FrameField f = build_frames(m);
  const std::vector<DefectSpec> spec = {{Vec3(0, 0, 1), 1},
                                        {Vec3(0, 0, -1), 1},
                                        {Vec3(1, 0, 0), 1},
                                        {Vec3(-1, 0, 0), -1}};
  const DefectSet found = detect_defects(m, f, hedgehog_ansatz(m, f, spec));
  ASSERT_EQ(found.size(), spec.size());
  for (const DefectSpec& d : spec) {
    int matches = 0;
    for (const Defect& g : found)
      if (S.geodesic_distance(g.position, d.centre) < 5 * m.mesh_size() && g.charge == d.charge)
        ++matches;
    EXPECT_EQ(matches, 1);
  }
}

TEST(Field, AnsatzPhaseOptimisationLowersTheEnergyOnTheSphere) {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 4);
  const FrameField f = build_frames(m);
  const DiscreteField u = hedgehog_ansatz(m, f, {{Vec3(0, 0, 1), 1}, {Vec3(0, 0, -1), 1}});
  EXPECT_EQ(detect_defects(m, f, u).size(), 2u);
}

TEST(Field, AnsatzChecksCharges) {
  const Triangulation m = gen_icosphere(Surface::sphere(1), 2);
  const FrameField f = build_frames(m);
  EXPECT_ERROR(hedgehog_ansatz(m, f, {{Vec3(0, 0, 1), 1}}), ErrorCode::ChargeMismatch);
  EXPECT_ERROR(hedgehog_ansatz(m, f, {{Vec3(0, 0, 1), 2}}), ErrorCode::ChargeMismatch);
  EXPECT_ERROR(hedgehog_ansatz(m, f, {}), ErrorCode::ChargeMismatch);
  // Open patches accept any total.
  const Triangulation g = gen_planar_grid(Surface::plane(), 16, 1.0);
  const FrameField fg = build_frames(g);
  const DefectSet d = detect_defects(g, fg, hedgehog_ansatz(g, fg, {{Vec3(0.05, 0.02, 0), -1}}));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].charge, -1);
}

TEST(Field, InterpolantBounds) {
  const Triangulation g = gen_planar_grid(Surface::plane(), 8, 1.0);
  const FrameField f = build_frames(g);
  const InterpolantBounds c = interpolant_bounds(g, realize(DiscreteField{std::vector<double>(g.num_vertices(), 0.4)}, f));
  EXPECT_NEAR(c.max_norm, 1.0, 1e-15);
  EXPECT_NEAR(c.min_norm, 1.0, 1e-15);

  const Triangulation m = gen_icosphere(Surface::sphere(1), 3);
  const FrameField fm = build_frames(m);
  const InterpolantBounds b = interpolant_bounds(
      m, realize(hedgehog_ansatz(m, fm, {{Vec3(0, 0, 1), 1}, {Vec3(0, 0, -1), 1}}), fm));
  EXPECT_LE(b.max_norm, 1.0 + 1e-12);
  EXPECT_LT(b.min_norm, 0.9);
  EXPECT_GT(b.gl_constant, 0.0);
}

TEST(Field, CsvRoundTripIsBitExact) {
  DiscreteField u{{0.1, -2.5, 1e-300, kPi, std::nextafter(1.0, 2.0)}};
  std::ostringstream os;
  write_field_csv(os, u, "abc123");
  std::istringstream is(os.str());
  EXPECT_EQ(read_field_csv(is, "abc123").theta, u.theta);
  std::istringstream again(os.str());
  EXPECT_ERROR(read_field_csv(again, "other"), ErrorCode::IoError);
  std::istringstream garbage("# mesh abc123\nvertex_index,theta\n0,zzz\n");
  EXPECT_ERROR(read_field_csv(garbage), ErrorCode::IoError);
}
