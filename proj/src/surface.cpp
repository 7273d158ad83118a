#include "shellxy/surface.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "shellxy/error.hpp"

namespace shellxy {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_centered(double x, double period) {
  return x - period * std::round(x / period);
}

}  // namespace

TangentBasis reference_frame(const Vec3& normal, const Vec3& primary) {
  Vec3 axis = primary.normalized();
  if (axis.cross(normal).norm() < 1e-6) {
    int k = 0;
    for (int c = 1; c < 3; ++c)
      if (std::abs(primary[c]) < std::abs(primary[k])) k = c;
    axis = Vec3::Unit(k);
  }
  TangentBasis b;
  b.normal = normal;
  b.e1 = (axis - axis.dot(normal) * normal).normalized();
  b.e2 = normal.cross(b.e1);
  return b;
}

Surface Surface::sphere(double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidSurface, "sphere radius must be positive");
  return Surface(SurfaceKind::Sphere, radius, 0.0, 0.0);
}

Surface Surface::torus(double major_radius, double minor_radius) {
  if (!(minor_radius > 0.0)) {
    throw Error(ErrorCode::InvalidSurface, "torus minor radius must be positive");
  }
  if (!(major_radius > minor_radius)) {
    throw Error(ErrorCode::InvalidSurface,
                "torus with minor radius >= major radius self-intersects");
  }
  return Surface(SurfaceKind::Torus, major_radius, minor_radius, 0.0);
}

Surface Surface::graph_bump(double amplitude, double width, double period) {
  if (!(width > 0.0) || !(period > 0.0) || !std::isfinite(amplitude)) {
    throw Error(ErrorCode::InvalidSurface, "graph bump needs positive width and period");
  }
  return Surface(SurfaceKind::GraphBump, amplitude, width, period);
}

int Surface::genus() const { return kind_ == SurfaceKind::Sphere ? 0 : 1; }

double Surface::diameter() const {
  switch (kind_) {
    case SurfaceKind::Sphere: return 2.0 * a_;
    case SurfaceKind::Torus: return 2.0 * (a_ + b_);
    case SurfaceKind::GraphBump: return std::sqrt(2.0) * c_;
  }
  return 0.0;
}

double Surface::tube_thickness() const {
  switch (kind_) {
    case SurfaceKind::Sphere: return 0.9 * a_;
    case SurfaceKind::Torus: return 0.9 / std::max(1.0 / b_, 1.0 / (a_ - b_));
    case SurfaceKind::GraphBump: {
      if (a_ == 0.0) return std::numeric_limits<double>::infinity();
      constexpr int n = 256;
      double kmax = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const Vec3 p = chart(c_ * (i + 0.5) / n - 0.5 * c_, c_ * (j + 0.5) / n - 0.5 * c_);
          auto [k1, k2] = principal_curvatures(p);
          kmax = std::max({kmax, std::abs(k1), std::abs(k2)});
        }
      }
      return kmax > 0.0 ? 0.9 / kmax : std::numeric_limits<double>::infinity();
    }
  }
  return 0.0;
}

double Surface::injectivity_radius() const {
  switch (kind_) {
    case SurfaceKind::Sphere: return kPi * a_;
    case SurfaceKind::Torus: return 0.5 * std::min(kPi * b_, kPi * (a_ - b_));
    case SurfaceKind::GraphBump: return 0.5 * c_;
  }
  return 0.0;
}

Surface::Height Surface::height(double u, double v) const {
  const double L = c_;
  const double w2 = 2.0 * b_ * b_;
  auto s = [L](double t) {
    const double q = std::sin(kPi * t / L);
    return (L / kPi) * (L / kPi) * q * q;
  };
  auto ds = [L](double t) { return (L / kPi) * std::sin(2.0 * kPi * t / L); };
  auto dds = [L](double t) { return 2.0 * std::cos(2.0 * kPi * t / L); };
  Height h{};
  h.f = a_ * std::exp(-(s(u) + s(v)) / w2);
  const double gu = ds(u) / w2;
  const double gv = ds(v) / w2;
  h.fu = -h.f * gu;
  h.fv = -h.f * gv;
  h.fuu = h.f * (gu * gu - dds(u) / w2);
  h.fvv = h.f * (gv * gv - dds(v) / w2);
  h.fuv = h.f * gu * gv;
  return h;
}

Vec3 Surface::chart(double u, double v) const {
  switch (kind_) {
    case SurfaceKind::Sphere:
      return a_ * Vec3(std::sin(v) * std::cos(u), std::sin(v) * std::sin(u), std::cos(v));
    case SurfaceKind::Torus: {
      const double rho = a_ + b_ * std::cos(v);
      return Vec3(rho * std::cos(u), rho * std::sin(u), b_ * std::sin(v));
    }
    case SurfaceKind::GraphBump: return Vec3(u, v, height(u, v).f);
  }
  return Vec3::Zero();
}

Vec3 Surface::chart_du(double u, double v) const {
  switch (kind_) {
    case SurfaceKind::Sphere:
      return a_ * Vec3(-std::sin(v) * std::sin(u), std::sin(v) * std::cos(u), 0.0);
    case SurfaceKind::Torus: {
      const double rho = a_ + b_ * std::cos(v);
      return Vec3(-rho * std::sin(u), rho * std::cos(u), 0.0);
    }
    case SurfaceKind::GraphBump: return Vec3(1.0, 0.0, height(u, v).fu);
  }
  return Vec3::Zero();
}

Vec3 Surface::chart_dv(double u, double v) const {
  switch (kind_) {
    case SurfaceKind::Sphere:
      return a_ * Vec3(std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), -std::sin(v));
    case SurfaceKind::Torus:
      return b_ * Vec3(-std::sin(v) * std::cos(u), -std::sin(v) * std::sin(u), std::cos(v));
    case SurfaceKind::GraphBump: return Vec3(0.0, 1.0, height(u, v).fv);
  }
  return Vec3::Zero();
}

Vec2 Surface::parameters(const Vec3& p) const {
  switch (kind_) {
    case SurfaceKind::Sphere:
      return Vec2(std::atan2(p.y(), p.x()), std::acos(std::clamp(p.z() / p.norm(), -1.0, 1.0)));
    case SurfaceKind::Torus:
      return Vec2(std::atan2(p.y(), p.x()), std::atan2(p.z(), std::hypot(p.x(), p.y()) - a_));
    case SurfaceKind::GraphBump: return Vec2(p.x(), p.y());
  }
  return Vec2::Zero();
}

Vec2 Surface::parameter_periods() const {
  switch (kind_) {
    case SurfaceKind::Sphere: return Vec2(2.0 * kPi, kPi);
    case SurfaceKind::Torus: return Vec2(2.0 * kPi, 2.0 * kPi);
    case SurfaceKind::GraphBump: return Vec2(c_, c_);
  }
  return Vec2::Zero();
}

void Surface::require_on_surface(const Vec3& p) const {
  const double residual = (project_unchecked(p) - p).norm();
  if (!(residual <= on_surface_tolerance())) {
    throw Error(ErrorCode::PointOffSurface,
                "projection residual " + std::to_string(residual) + " exceeds tolerance");
  }
}

Vec3 Surface::normal_unchecked(const Vec3& p) const {
  switch (kind_) {
    case SurfaceKind::Sphere: return p.normalized();
    case SurfaceKind::Torus: {
      const double u = std::atan2(p.y(), p.x());
      const double v = std::atan2(p.z(), std::hypot(p.x(), p.y()) - a_);
      return Vec3(std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v));
    }
    case SurfaceKind::GraphBump: {
      const Height h = height(p.x(), p.y());
      return Vec3(-h.fu, -h.fv, 1.0).normalized();
    }
  }
  return Vec3::UnitZ();
}

Vec3 Surface::normal(const Vec3& p) const {
  require_on_surface(p);
  return normal_unchecked(p);
}

double Surface::gauss_curvature(const Vec3& p) const {
  require_on_surface(p);
  switch (kind_) {
    case SurfaceKind::Sphere: return 1.0 / (a_ * a_);
    case SurfaceKind::Torus: {
      const double v = std::atan2(p.z(), std::hypot(p.x(), p.y()) - a_);
      return std::cos(v) / (b_ * (a_ + b_ * std::cos(v)));
    }
    case SurfaceKind::GraphBump: {
      const Height h = height(p.x(), p.y());
      const double w2 = 1.0 + h.fu * h.fu + h.fv * h.fv;
      return (h.fuu * h.fvv - h.fuv * h.fuv) / (w2 * w2);
    }
  }
  return 0.0;
}

Vec3 Surface::shape_operator_unchecked(const Vec3& p, const Vec3& x) const {
  switch (kind_) {
    case SurfaceKind::Sphere: return x / a_;
    case SurfaceKind::Torus: {
      const double u = std::atan2(p.y(), p.x());
      const double v = std::atan2(p.z(), std::hypot(p.x(), p.y()) - a_);
      const Vec3 tu(-std::sin(u), std::cos(u), 0.0);
      const Vec3 tv(-std::sin(v) * std::cos(u), -std::sin(v) * std::sin(u), std::cos(v));
      return x.dot(tv) / b_ * tv + x.dot(tu) * std::cos(v) / (a_ + b_ * std::cos(v)) * tu;
    }
    case SurfaceKind::GraphBump: {
      const Height h = height(p.x(), p.y());
      const Vec3 n(-h.fu, -h.fv, 1.0);
      const double w = n.norm();
      const Vec3 nu(-h.fuu, -h.fuv, 0.0);
      const Vec3 nv(-h.fuv, -h.fvv, 0.0);
      const double wu = (h.fu * h.fuu + h.fv * h.fuv) / w;
      const double wv = (h.fu * h.fuv + h.fv * h.fvv) / w;
      const Vec3 gamma_u = nu / w - n * wu / (w * w);
      const Vec3 gamma_v = nv / w - n * wv / (w * w);
      // x = a x_u + b x_v with x_u = (1, 0, f_u), x_v = (0, 1, f_v).
      return x.x() * gamma_u + x.y() * gamma_v;
    }
  }
  return Vec3::Zero();
}

Vec3 Surface::shape_operator(const Vec3& p, const Vec3& x) const {
  require_on_surface(p);
  const Vec3 n = normal_unchecked(p);
  if (std::abs(x.dot(n)) > 1e-9 * x.norm()) {
    throw Error(ErrorCode::NotTangent, "vector is not tangent at the given point");
  }
  return shape_operator_unchecked(p, x);
}

std::pair<double, double> Surface::principal_curvatures(const Vec3& p) const {
  const TangentBasis b = reference_frame(normal_unchecked(p));
  const Vec3 s1 = shape_operator_unchecked(p, b.e1);
  const Vec3 s2 = shape_operator_unchecked(p, b.e2);
  Eigen::Matrix2d m;
  m << b.e1.dot(s1), b.e1.dot(s2), b.e2.dot(s1), b.e2.dot(s2);
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

Vec3 Surface::project_unchecked(const Vec3& x) const {
  switch (kind_) {
    case SurfaceKind::Sphere: return a_ * x.normalized();
    case SurfaceKind::Torus: {
      const double rho = std::hypot(x.x(), x.y());
      const Vec3 c = a_ * Vec3(x.x() / rho, x.y() / rho, 0.0);
      return c + b_ * (x - c).normalized();
    }
    case SurfaceKind::GraphBump: {
      if (a_ == 0.0) return Vec3(x.x(), x.y(), 0.0);
      double u = x.x();
      double v = x.y();
      for (int it = 0; it < 60; ++it) {
        const Height h = height(u, v);
        const Vec3 c(u, v, h.f);
        const Vec3 d = c - x;
        const Vec3 cu(1.0, 0.0, h.fu);
        const Vec3 cv(0.0, 1.0, h.fv);
        const Vec2 g(cu.dot(d), cv.dot(d));
        Eigen::Matrix2d hess;
        hess << cu.dot(cu) + h.fuu * d.z(), cu.dot(cv) + h.fuv * d.z(),
            cu.dot(cv) + h.fuv * d.z(), cv.dot(cv) + h.fvv * d.z();
        if (hess.determinant() <= 0.0 || hess(0, 0) <= 0.0) {
          hess << cu.dot(cu), cu.dot(cv), cu.dot(cv), cv.dot(cv);
        }
        const Vec2 step = hess.ldlt().solve(g);
        u -= step.x();
        v -= step.y();
        if (step.norm() < 1e-16 * c_) break;
      }
      return chart(u, v);
    }
  }
  return x;
}

Vec3 Surface::project(const Vec3& x) const {
  if (kind_ == SurfaceKind::Sphere && x.norm() == 0.0) {
    throw Error(ErrorCode::OutsideTubularNeighbourhood, "the sphere centre has no projection");
  }
  if (kind_ == SurfaceKind::Torus && std::hypot(x.x(), x.y()) == 0.0) {
    throw Error(ErrorCode::OutsideTubularNeighbourhood, "points on the torus axis have no projection");
  }
  const Vec3 p = project_unchecked(x);
  if (!((p - x).norm() < tube_thickness())) {
    throw Error(ErrorCode::OutsideTubularNeighbourhood,
                "point lies outside the tubular neighbourhood");
  }
  return p;
}

double Surface::distance_to_surface(const Vec3& x) const { return (project(x) - x).norm(); }

namespace {

// Dijkstra on a periodic parameter grid anchored so that `p` is the node (0, 0).
double grid_geodesic(const Surface& s, const Vec3& p, const Vec3& q, int nu, int nv) {
  const Vec2 per = s.parameter_periods();
  const Vec2 pp = s.parameters(p);
  const Vec2 qp = s.parameters(q);
  auto node = [&](int i, int j) {
    i = ((i % nu) + nu) % nu;
    j = ((j % nv) + nv) % nv;
    return static_cast<std::size_t>(i) * nv + j;
  };
  auto point = [&](int i, int j) {
    return s.chart(pp.x() + per.x() * i / nu, pp.y() + per.y() * j / nv);
  };
  std::vector<Vec3> pts(static_cast<std::size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) pts[node(i, j)] = point(i, j);

  static constexpr int kSteps[16][2] = {{1, 0}, {-1, 0}, {0, 1},  {0, -1}, {1, 1},  {1, -1},
                                        {-1, 1}, {-1, -1}, {2, 1}, {2, -1}, {-2, 1}, {-2, -1},
                                        {1, 2},  {1, -2},  {-1, 2}, {-1, -2}};
  std::vector<double> dist(pts.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[0] = 0.0;
  heap.emplace(0.0, 0);
  while (!heap.empty()) {
    auto [d, k] = heap.top();
    heap.pop();
    if (d > dist[k]) continue;
    const int i = static_cast<int>(k / nv);
    const int j = static_cast<int>(k % nv);
    for (const auto& st : kSteps) {
      const std::size_t m = node(i + st[0], j + st[1]);
      const double nd = d + (pts[m] - pts[k]).norm();
      if (nd < dist[m]) {
        dist[m] = nd;
        heap.emplace(nd, m);
      }
    }
  }
  // Offset of q in grid units; evaluate through the corners of its cell.
  const double fu = wrap_centered(qp.x() - pp.x(), per.x()) / per.x() * nu;
  const double fv = wrap_centered(qp.y() - pp.y(), per.y()) / per.y() * nv;
  const int iu = static_cast<int>(std::floor(fu));
  const int iv = static_cast<int>(std::floor(fv));
  double best = std::numeric_limits<double>::infinity();
  for (int di = 0; di <= 1; ++di)
    for (int dj = 0; dj <= 1; ++dj) {
      const std::size_t m = node(iu + di, iv + dj);
      best = std::min(best, dist[m] + (pts[m] - q).norm());
    }
  return best;
}

}  // namespace

double Surface::geodesic_distance(const Vec3& p, const Vec3& q, int refinement) const {
  require_on_surface(p);
  require_on_surface(q);
  if ((p - q).norm() == 0.0) return 0.0;
  switch (kind_) {
    case SurfaceKind::Sphere: {
      const double c = std::clamp(p.dot(q) / (a_ * a_), -1.0, 1.0);
      return a_ * std::atan2(p.cross(q).norm() / (a_ * a_), c);
    }
    case SurfaceKind::Torus: {
      const int nv = 64 << refinement;
      const int nu = static_cast<int>(std::ceil(nv * (a_ + b_) / b_));
      return grid_geodesic(*this, p, q, nu, nv);
    }
    case SurfaceKind::GraphBump: {
      if (a_ == 0.0) {
        const double dx = wrap_centered(q.x() - p.x(), c_);
        const double dy = wrap_centered(q.y() - p.y(), c_);
        return std::hypot(dx, dy);
      }
      const int n = 128 << refinement;
      return grid_geodesic(*this, p, q, n, n);
    }
  }
  return 0.0;
}

Vec3 Surface::exp_map(const Vec3& base, const TangentBasis& basis, const Vec2& z) const {
  const double rho = z.norm();
  if (rho == 0.0) return base;
  const Vec3 t = z.x() * basis.e1 + z.y() * basis.e2;
  if (kind_ == SurfaceKind::Sphere) {
    const Vec3 xhat = base / a_;
    return a_ * (std::cos(rho / a_) * xhat + std::sin(rho / a_) * (t / rho));
  }
  if (is_flat()) return base + t;
  // Invert the tangent-plane projection chart by fixed-point iteration.
  Vec3 p = project_unchecked(base + t);
  for (int it = 0; it < 100; ++it) {
    const Vec2 cur((p - base).dot(basis.e1), (p - base).dot(basis.e2));
    const Vec2 err = z - cur;
    if (err.norm() < 1e-15 * std::max(1.0, rho)) break;
    p = project_unchecked(p + err.x() * basis.e1 + err.y() * basis.e2);
  }
  return p;
}

Vec2 Surface::log_map(const Vec3& base, const TangentBasis& basis, const Vec3& p) const {
  if (kind_ == SurfaceKind::Sphere) {
    const Vec3 xhat = base.normalized();
    const Vec3 t = p - p.dot(xhat) * xhat;
    const double tn = t.norm();
    if (tn == 0.0) return Vec2::Zero();
    const double angle = std::atan2(tn, p.dot(xhat));
    const Vec3 dir = t / tn;
    return a_ * angle * Vec2(dir.dot(basis.e1), dir.dot(basis.e2));
  }
  const Vec3 d = p - base;
  return Vec2(d.dot(basis.e1), d.dot(basis.e2));
}

Vec3 Surface::push_forward(const Vec3& base, const TangentBasis& basis, const Vec2& z,
                           const Vec2& w) const {
  if (z.norm() == 0.0) return (w.x() * basis.e1 + w.y() * basis.e2).normalized();
  const double h = 1e-6 * std::max(z.norm(), 1e-3 * diameter());
  const Vec3 plus = exp_map(base, basis, z + h * w);
  const Vec3 minus = exp_map(base, basis, z - h * w);
  const Vec3 at = exp_map(base, basis, z);
  const Vec3 n = normal_unchecked(at);
  Vec3 d = plus - minus;
  d -= d.dot(n) * n;
  return d.normalized();
}

}  // namespace shellxy
