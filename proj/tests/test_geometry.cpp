#include "doctest.h"

#include <cmath>
#include <random>

#include "heatlab/domain.hpp"
#include "heatlab/tube.hpp"
#include "oracles.hpp"

using namespace heatlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("chart metrics") {
  const auto e = AmbientChart::euclidean();
  const Mat2 ge = e.metric(0.3, -2.0);
  CHECK(ge[0] == 1.0);
  CHECK(ge[3] == 1.0);
  CHECK(ge[1] == 0.0);

  const auto s = AmbientChart::sphere();
  const Mat2 gs = s.metric(kPi / 3, 1.0);
  CHECK(gs[0] == doctest::Approx(1.0));
  CHECK(gs[3] == doctest::Approx(std::sin(kPi / 3) * std::sin(kPi / 3)));
  CHECK_THROWS(s.metric(0.01, 0.0)); // inside the pole margin

  const auto h = AmbientChart::hyperbolic();
  const Mat2 gh = h.metric(0.5, 0.0);
  const double f = 2.0 / (1.0 - 0.25);
  CHECK(gh[0] == doctest::Approx(f * f));
  CHECK_THROWS(h.metric(1.1, 0.0));
}

TEST_CASE("geodesic offsets reproduce closed-form circles") {
  // Sphere: walking distance d from a point lands at geodesic distance d.
  const auto s = AmbientChart::sphere();
  const Vec2 p{kPi / 2, 1.0};
  const Vec2 q = s.geodesic_offset(p, {1.0, 0.0}, 0.4); // along +u from the equator
  CHECK(q[0] == doctest::Approx(kPi / 2 + 0.4));
  CHECK(q[1] == doctest::Approx(1.0));

  // Hyperbolic: from the origin, geodesic distance d lands at tanh(d/2).
  const auto h = AmbientChart::hyperbolic();
  const Vec2 o{0.0, 0.0};
  const Vec2 r = h.geodesic_offset(o, {0.5, 0.0}, 1.3); // non-unit direction
  CHECK(std::hypot(r[0], r[1]) == doctest::Approx(std::tanh(1.3 / 2)).epsilon(1e-12));
}

TEST_CASE("boundary geometry: unit disk circumference") {
  const DomainSpec d = DomainSpec::disk(1.0);
  const BoundaryGeometry bg = boundary_geometry(d, 1024);
  CHECK(bg.total_length == doctest::Approx(2 * kPi).epsilon(1e-5 / (2 * kPi)));
  // Inner normal points toward the center.
  const auto& s0 = bg.samples.front();
  CHECK(s0.normal[0] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(s0.normal[1]) < 1e-6);
}

TEST_CASE("boundary geometry: spherical cap circumference") {
  const auto chart = AmbientChart::sphere();
  const DomainSpec cap = DomainSpec::geodesic_cap(chart, {kPi / 2, 3.0}, kPi / 4);
  const BoundaryGeometry bg = boundary_geometry(cap, 1024);
  CHECK(bg.total_length == doctest::Approx(2 * kPi * std::sin(kPi / 4)).epsilon(1e-4));
}

TEST_CASE("boundary geometry: ellipse perimeter vs quadrature oracle") {
  const double oracle = oracles::ellipse_perimeter(1.2, 0.8);
  const DomainSpec d = DomainSpec::ellipse(1.2, 0.8);
  const BoundaryGeometry bg = boundary_geometry(d, 2048);
  CHECK(bg.total_length == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("boundary geometry rejects tiny resolution and bad loops") {
  const DomainSpec d = DomainSpec::disk(1.0);
  CHECK_THROWS(boundary_geometry(d, 8));

  // Figure-eight: self-intersecting loop is rejected with its index.
  std::vector<Vec2> fig;
  for (int i = 0; i < 128; ++i) {
    const double t = 2 * kPi * i / 128;
    fig.push_back({std::sin(2 * t), std::sin(t)});
  }
  CHECK_THROWS_WITH_AS(DomainSpec::from_loops(AmbientChart::euclidean(),
                                              {ClosedCurve(fig, CurveKind::periodic_spline)}),
                       doctest::Contains("loop 0"), std::invalid_argument);
}

TEST_CASE("volume projection") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  // Constant speed projects to zero.
  const DeformationField c1 = DeformationField::constant(1.0);
  const DeformationField p1 = project_volume_preserving(c1, disk);
  CHECK(p1.volume_projected());
  CHECK(std::abs(p1.speed(0, 0.7)) < 1e-12);

  // cos(theta) already has zero mean on the circle.
  const DeformationField cs = DeformationField::harmonic(1);
  const DeformationField pcs = project_volume_preserving(cs, disk);
  CHECK(pcs.speed(0, 0.9) == doctest::Approx(std::cos(0.9)).epsilon(1e-10));

  // 1 + cos on the ellipse: projected mean re-check below 1e-10.
  const DomainSpec ell = DomainSpec::ellipse(1.2, 0.8);
  const DeformationField f(
      [](int, double th) { return 1.0 + std::cos(th); });
  const DeformationField pf = project_volume_preserving(f, ell);
  CHECK(std::abs(mean_normal_speed(pf, ell)) < 1e-10);
}

TEST_CASE("perturb_domain: uniform inward offset shrinks the disk") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  const DomainSpec small = perturb_domain(disk, DeformationField::constant(1.0), 0.1);
  for (const auto& p : small.loops()[0].samples())
    CHECK(std::hypot(p[0], p[1]) == doctest::Approx(0.9).epsilon(1e-10));
}

TEST_CASE("perturb_domain: eps = 0 is the identity, bit for bit") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  const DomainSpec same = perturb_domain(disk, DeformationField::harmonic(3), 0.0);
  const auto& a = disk.loops()[0].samples();
  const auto& b = same.loops()[0].samples();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i][0] == b[i][0]);
    CHECK(a[i][1] == b[i][1]);
  }
}

TEST_CASE("perturb_domain: zero-mean field changes area only at O(eps^2)") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  const DeformationField v = project_volume_preserving(DeformationField::harmonic(1), disk);
  auto area = [](const DomainSpec& d) {
    const BoundaryGeometry bg = boundary_geometry(d, 4096);
    double acc = 0.0;
    for (std::size_t i = 0; i < bg.samples.size(); ++i) {
      const auto& p = bg.samples[i].point;
      const auto& q = bg.samples[(i + 1) % bg.samples.size()].point;
      acc += p[0] * q[1] - q[0] * p[1];
    }
    return std::abs(acc) / 2;
  };
  // The inward offset by eps*cos(theta) gives |Omega_eps| = pi + pi eps^2 / 2
  // exactly: the first-order term vanishes, the change is quadratic.
  const double base = area(disk);
  const double d1 = std::abs(area(perturb_domain(disk, v, 0.05)) - base);
  const double d2 = std::abs(area(perturb_domain(disk, v, 0.025)) - base);
  CHECK(d1 == doctest::Approx(kPi * 0.05 * 0.05 / 2).epsilon(1e-3));
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("perturb_domain round trip returns within O(eps^2)") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-0.08, 0.08);
  for (int trial = 0; trial < 4; ++trial) {
    const double eps = U(rng);
    const DeformationField v = DeformationField::harmonic(2 + trial % 2);
    const DomainSpec there = perturb_domain(disk, v, eps);
    const DomainSpec back = perturb_domain(there, v, -eps);
    double worst = 0.0;
    const auto& a = disk.loops()[0].samples();
    const auto& b = back.loops()[0].samples();
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::hypot(a[i][0] - b[i][0], a[i][1] - b[i][1]));
    CHECK(worst <= 10.0 * eps * eps);
  }
}

TEST_CASE("perturb_domain rejects self-intersection") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  // Inward push past the origin folds the boundary through itself.
  const DeformationField v = DeformationField::harmonic(6, false, 1.0);
  CHECK_THROWS_WITH_AS(perturb_domain(disk, v, 1.2), doctest::Contains("eps"),
                       std::invalid_argument);
}

TEST_CASE("geodesic ball areas match closed forms on all charts") {
  // Area via int_0^R circumference(r) dr with the boundary-geometry lengths
  // (512 radial Simpson panels x 512 boundary samples).
  auto ball_area = [](const AmbientChart& chart, Vec2 center, double R) {
    auto circ = [&](double r) {
      if (r < 1e-9) return 0.0;
      return boundary_geometry(DomainSpec::geodesic_cap(chart, center, r, 256), 512)
          .total_length;
    };
    const int n = 512;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r0 = R * i / n, r1 = R * (i + 1) / n;
      acc += (r1 - r0) / 6.0 * (circ(r0) + 4.0 * circ((r0 + r1) / 2) + circ(r1));
    }
    return acc;
  };
  const double R = 0.8;
  CHECK(ball_area(AmbientChart::euclidean(), {0, 0}, R) ==
        doctest::Approx(kPi * R * R).epsilon(1e-4));
  CHECK(ball_area(AmbientChart::sphere(), {kPi / 2, 2.0}, R) ==
        doctest::Approx(2 * kPi * (1 - std::cos(R))).epsilon(1e-4));
  CHECK(ball_area(AmbientChart::hyperbolic(), {0, 0}, R) ==
        doctest::Approx(2 * kPi * (std::cosh(R) - 1)).epsilon(1e-4));
}

TEST_CASE("tube profile invariants") {
  // Euclidean ball drift is exactly (n-1)/r.
  const TubeProfile ball(0, 3, 1.0, [](double r) { return r * r; },
                         [](double r) { return 2.0 / r; });
  CHECK(ball.origin_order() == 2);
  CHECK(ball.drift(0.37) == 2.0 / 0.37);
  CHECK_FALSE(ball.reflected());

  const TubeProfile band(1, 2, 0.5, [](double r) { return std::cos(r); },
                         [](double r) { return -std::tan(r); });
  CHECK(band.origin_order() == 0);
  CHECK(band.reflected());

  // Density inconsistent with the declared soul dimension is rejected.
  CHECK_THROWS(TubeProfile(0, 3, 1.0, [](double r) { return r; },
                           [](double r) { return 1.0 / r; }));
}
