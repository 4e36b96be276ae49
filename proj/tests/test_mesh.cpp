#include "doctest.h"

#include <cmath>
#include <sstream>

#include "heatlab/mesh.hpp"
#include "heatlab/polyline.hpp"

using namespace heatlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("polyline shape: inside and distance on the annulus") {
  const DomainSpec ann = DomainSpec::annulus(0.5, 1.0);
  const PolylineShape shape(ann);
  CHECK(shape.inside({0.75, 0.0}));
  CHECK_FALSE(shape.inside({0.0, 0.0}));   // in the hole
  CHECK_FALSE(shape.inside({1.2, 0.0}));   // outside
  CHECK(shape.distance({0.75, 0.0}) == doctest::Approx(0.25).epsilon(1e-4));
  CHECK(shape.signed_distance({0.75, 0.0}) < 0.0);
  CHECK(shape.signed_distance({0.2, 0.0}) == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(shape.loop_gap(0, 1) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("triangulate: unit disk area and quality") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  const MeshedDomain m = triangulate(disk, 0.05);
  CHECK(mesh_area(m) == doctest::Approx(kPi).epsilon(3e-3 / kPi));
  CHECK(mesh_min_angle(m) >= 20.0);
  CHECK(m.h_max <= 1.5 * 0.05);
  // Boundary nodes on the circle within 1e-10.
  for (const auto& b : m.boundary)
    CHECK(std::hypot(m.nodes[b.node][0], m.nodes[b.node][1]) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("triangulate: annulus area") {
  const DomainSpec ann = DomainSpec::annulus(0.5, 1.0);
  const MeshedDomain m = triangulate(ann, 0.05);
  CHECK(mesh_area(m) == doctest::Approx(0.75 * kPi).epsilon(3e-3));
  // Two boundary loops survive as cycles.
  int loops = 0;
  for (const auto& b : m.boundary) loops = std::max(loops, b.loop + 1);
  CHECK(loops == 2);
}

TEST_CASE("triangulate: square with polyline boundary") {
  const DomainSpec sq = DomainSpec::rectangle({0.0, 0.0}, {1.0, 1.0});
  const MeshedDomain m = triangulate(sq, 0.06);
  CHECK(mesh_area(m) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mesh_min_angle(m) >= 20.0);
}

TEST_CASE("band mesh: spherical band area matches the zone formula") {
  const DomainSpec band = DomainSpec::spherical_band(kPi / 2 - 0.5, kPi / 2 + 0.5);
  const MeshedDomain m = band_mesh(band, 0.05);
  CHECK(mesh_area(m) == doctest::Approx(4 * kPi * std::sin(0.5)).epsilon(2e-4));
  CHECK(m.h_max <= 1.5 * 0.05);
  // triangulate() dispatches band domains to the structured mesher.
  const MeshedDomain m2 = triangulate(band, 0.1);
  CHECK(mesh_area(m2) == doctest::Approx(4 * kPi * std::sin(0.5)).epsilon(1e-3));
}

TEST_CASE("triangulate: spherical cap area") {
  const DomainSpec cap = DomainSpec::geodesic_cap(AmbientChart::sphere(), {kPi / 2, 3.0}, 0.7);
  const MeshedDomain m = triangulate(cap, 0.05);
  CHECK(mesh_area(m) == doctest::Approx(2 * kPi * (1 - std::cos(0.7))).epsilon(2e-3));
}

TEST_CASE("triangulate rejects unmeshable specs") {
  CHECK_THROWS(triangulate(DomainSpec::disk(1.0), -0.1));
  // Annulus with gap 0.1 cannot be meshed at target_h = 0.5.
  CHECK_THROWS_WITH_AS(triangulate(DomainSpec::annulus(0.9, 1.0), 0.5),
                       doctest::Contains("unmeshable"), std::invalid_argument);
}

TEST_CASE("mesh round trip through the text format") {
  const MeshedDomain m = triangulate(DomainSpec::disk(1.0), 0.12);
  std::stringstream ss;
  write_mesh(ss, m);
  const MeshedDomain r = read_mesh(ss);
  REQUIRE(r.nodes.size() == m.nodes.size());
  REQUIRE(r.triangles.size() == m.triangles.size());
  CHECK(r.boundary.size() == m.boundary.size());
  CHECK(mesh_area(r) == doctest::Approx(mesh_area(m)).epsilon(1e-14));
}

TEST_CASE("meshing is deterministic") {
  const DomainSpec ell = DomainSpec::ellipse(1.2, 0.8);
  const MeshedDomain a = triangulate(ell, 0.08);
  const MeshedDomain b = triangulate(ell, 0.08);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i][0] == b.nodes[i][0]);
    CHECK(a.nodes[i][1] == b.nodes[i][1]);
  }
}
