#pragma once

#include <functional>
#include <string>
#include <vector>

#include "heatlab/polynomial.hpp"
#include "heatlab/tube.hpp"

namespace heatlab {

/// One catalog tube: profile plus the bookkeeping needed to audit it.  All
/// per-tube functionals are reported per unit soul volume; soul_volume is the
/// factor that converts integrals of J into honest tube volumes.
struct TubeCatalogEntry {
  std::string name;
  TubeProfile profile;
  std::string ambient;
  std::string soul;
  std::string provenance;
  bool expected_cfp = true;
  double soul_volume = 1.0;
  double tube_volume_closed_form = 0.0; // at the entry's radius
};

/// The built-in tubes: flat/hyperbolic/spherical balls, equator tubes on the
/// 2- and 3-sphere, and the minimal-Clifford-torus tube in the 3-sphere
/// (density cos(2r), derived from the product-of-circles equidistants).
std::vector<TubeCatalogEntry> tube_catalog();

/// Rebuilds a catalog profile with a custom radius.
TubeProfile catalog_profile(const std::string& name, double radius);

struct BandResolutions {
  double h2d = 0.045;
  int radial_intervals = 4000;
  int steps_per_decade = 120;
  double t_max = 1.0;
  std::vector<double> times{0.05, 0.1, 0.2, 0.4, 0.8};
};

/// Solves torsion and heat on the equatorial band of the 2-sphere twice
/// (radial reduction with J = cos r, and genuine 2D surface FEM) and reports
/// the discrepancies.  All 2D quantities are divided by the soul volume
/// 2*pi to match the per-unit-soul 1D normalization.
struct BandCrossValidation {
  double T1_radial = 0.0, T1_fem = 0.0, T1_gap = 0.0;
  double E1_mid_radial = 0.0, E1_mid_fem = 0.0, E1_gap = 0.0;
  double flux_radial = 0.0, flux_fem_mean = 0.0, flux_gap = 0.0;
  double flux_fem_cv = 0.0;
  std::vector<double> times;
  std::vector<double> H_radial, H_fem, H_gap;
  double max_H_gap = 0.0;
};

BandCrossValidation cross_validate_band(double R, const BandResolutions& res = {});

} // namespace heatlab
