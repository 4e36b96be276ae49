#include "heatlab/isoparametric.hpp"

#include <cmath>
#include <stdexcept>

#include "heatlab/mesh.hpp"
#include "heatlab/moments.hpp"
#include "heatlab/radial.hpp"

namespace heatlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

TubeProfile make_profile(const std::string& name, double R) {
  using Fn = TubeProfile::Fn;
  if (name == "interval")
    return TubeProfile(0, 1, R, [](double) { return 1.0; }, [](double) { return 0.0; });
  if (name == "euclidean-ball-2d")
    return TubeProfile(0, 2, R, [](double r) { return r; }, [](double r) { return 1.0 / r; });
  if (name == "euclidean-ball-3d")
    return TubeProfile(0, 3, R, [](double r) { return r * r; }, [](double r) { return 2.0 / r; });
  if (name == "hyperbolic-disk")
    return TubeProfile(0, 2, R, [](double r) { return std::sinh(r); },
                       [](double r) { return std::cosh(r) / std::sinh(r); });
  if (name == "spherical-cap")
    return TubeProfile(0, 2, R, [](double r) { return std::sin(r); },
                       [](double r) { return std::cos(r) / std::sin(r); });
  if (name == "s2-equator-tube")
    return TubeProfile(1, 2, R, [](double r) { return std::cos(r); },
                       [](double r) { return -std::tan(r); });
  if (name == "s3-ball")
    return TubeProfile(0, 3, R, [](double r) { return std::sin(r) * std::sin(r); },
                       [](double r) { return 2.0 * std::cos(r) / std::sin(r); });
  if (name == "s3-equator-tube")
    return TubeProfile(2, 3, R, [](double r) { return std::cos(r) * std::cos(r); },
                       [](double r) { return -2.0 * std::tan(r); });
  if (name == "s3-clifford-tube")
    return TubeProfile(2, 3, R, [](double r) { return std::cos(2.0 * r); },
                       [](double r) { return -2.0 * std::tan(2.0 * r); });
  throw std::invalid_argument("unknown catalog profile: " + name);
}

} // namespace

TubeProfile catalog_profile(const std::string& name, double radius) {
  return make_profile(name, radius);
}

std::vector<TubeCatalogEntry> tube_catalog() {
  std::vector<TubeCatalogEntry> cat;
  auto add = [&](const std::string& name, double R, const std::string& ambient,
                 const std::string& soul, const std::string& provenance, double soul_volume,
                 double volume) {
    cat.push_back({name, make_profile(name, R), ambient, soul, provenance, true, soul_volume,
                   volume});
  };
  add("interval", 1.0, "R^1", "midpoint", "flat 1D ball", 1.0, 2.0);
  add("euclidean-ball-2d", 1.0, "R^2", "center point",
      "geodesic balls are the only compact isoparametric tubes of flat space (Alexandrov)",
      2 * kPi, kPi);
  add("euclidean-ball-3d", 1.0, "R^3", "center point",
      "geodesic balls are the only compact isoparametric tubes of flat space (Alexandrov)",
      4 * kPi, 4 * kPi / 3);
  add("hyperbolic-disk", 1.0, "H^2", "center point",
      "geodesic balls are the only compact isoparametric tubes of hyperbolic space", 2 * kPi,
      2 * kPi * (std::cosh(1.0) - 1.0));
  add("spherical-cap", kPi / 4, "S^2", "center point",
      "geodesic balls bounded by distance spheres", 2 * kPi,
      2 * kPi * (1.0 - std::cos(kPi / 4)));
  add("s2-equator-tube", 0.5, "S^2", "equator circle (minimal)",
      "tube around a totally geodesic equator; equidistants are latitude circles", 2 * kPi,
      4 * kPi * std::sin(0.5));
  add("s3-ball", 1.0, "S^3", "center point", "geodesic balls bounded by distance spheres",
      4 * kPi, kPi * (2.0 - std::sin(2.0)));
  add("s3-equator-tube", 0.5, "S^3", "totally geodesic S^2 (minimal)",
      "tube around a totally geodesic hypersphere", 4 * kPi,
      2 * kPi * (2 * 0.5 + std::sin(2 * 0.5)));
  // Equidistants of the minimal Clifford torus are the tori
  // S^1(cos(pi/4+r)) x S^1(sin(pi/4+r)) with area 2 pi^2 sin(2(pi/4+r))
  // = 2 pi^2 cos(2r); J(0) = 1, J'(0) = 0 (minimal soul).
  add("s3-clifford-tube", kPi / 8, "S^3",
      "minimal Clifford torus S^1(1/sqrt2) x S^1(1/sqrt2)",
      "tube around the minimal Clifford torus; g=2 isoparametric family", 2 * kPi * kPi,
      2 * kPi * kPi * std::sin(2 * (kPi / 8)));
  return cat;
}

BandCrossValidation cross_validate_band(double R, const BandResolutions& res) {
  if (!(R > 0.0) || R >= kPi / 2 - 0.06)
    throw std::invalid_argument("band half-width must satisfy 0 < R < pi/2 - margin");

  BandCrossValidation out;
  out.times = res.times;
  const double soul = 2 * kPi; // equator length

  // Radial reduction.
  const TubeProfile prof = make_profile("s2-equator-tube", R);
  const RadialGrid grid = RadialGrid::uniform(prof, res.radial_intervals);
  const AssembledSystem rsys = assemble(grid);
  const MomentTable rtab = exit_hierarchy(rsys, 1);
  out.T1_radial = rtab.T[0];
  out.E1_mid_radial = rtab.E[0].values[0];
  out.flux_radial = rtab.flux[0][0];

  // 2D surface FEM on the colatitude chart.
  const DomainSpec band = DomainSpec::spherical_band(kPi / 2 - R, kPi / 2 + R);
  const MeshedDomain mesh = band_mesh(band, res.h2d);
  const AssembledSystem fsys = assemble(mesh);
  const MomentTable ftab = exit_hierarchy(fsys, 1);
  out.T1_fem = ftab.T[0] / soul;

  // Midline value: average E_1 over nodes nearest the equator.
  double mid_acc = 0.0;
  int mid_n = 0;
  double mid_dist = 1e300;
  for (const auto& p : mesh.nodes) mid_dist = std::min(mid_dist, std::abs(p[0] - kPi / 2));
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    if (std::abs(mesh.nodes[i][0] - kPi / 2) < mid_dist + 1e-9) {
      mid_acc += ftab.E[0].values[static_cast<int>(i)];
      ++mid_n;
    }
  out.E1_mid_fem = mid_acc / mid_n;

  const FluxStats fs = flux_statistics(fsys, ftab.flux[0]);
  out.flux_fem_mean = fs.mean;
  out.flux_fem_cv = fs.cv;

  out.T1_gap = std::abs(out.T1_fem - out.T1_radial) / out.T1_radial;
  out.E1_gap = std::abs(out.E1_mid_fem - out.E1_mid_radial) / out.E1_mid_radial;
  out.flux_gap = std::abs(out.flux_fem_mean - out.flux_radial) / std::abs(out.flux_radial);

  // Heat content at the probe times.
  const TimeGrid tg_r = TimeGrid::geometric(1e-5 * rsys.scale2, res.t_max, res.steps_per_decade);
  HeatOptions hopt;
  hopt.record_fields = false;
  const HeatTimeline tl_r = solve_heat(rsys, tg_r, hopt);
  const TimeGrid tg_f = TimeGrid::geometric(1e-5 * rsys.scale2, res.t_max, res.steps_per_decade);
  const HeatTimeline tl_f = solve_heat(fsys, tg_f, hopt);
  for (double t : res.times) {
    const double h1 = tl_r.content_at(t);
    const double h2 = tl_f.content_at(t) / soul;
    out.H_radial.push_back(h1);
    out.H_fem.push_back(h2);
    const double gap = std::abs(h1 - h2) / std::abs(h1);
    out.H_gap.push_back(gap);
    out.max_H_gap = std::max(out.max_H_gap, gap);
  }
  return out;
}

} // namespace heatlab
