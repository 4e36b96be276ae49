#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heatlab/domain.hpp"
#include "heatlab/tube.hpp"

namespace heatlab {

/// One flat bag of knobs for the experiment runners; CLI flags mirror these
/// keys one-to-one and every output artifact records the hash of canonical().
struct ExperimentConfig {
  // Domain / profile selection.  When `profile` is set the 1D reduction is
  // used; otherwise `domain` picks a 2D spec.
  std::string domain = "disk"; // disk|ellipse|annulus|square|spherical-cap|spherical-band
  std::string profile;         // catalog profile name
  double radius = 1.0;
  double ellipse_a = 1.2;
  double ellipse_b = 0.8;
  double inner_radius = 0.5;
  double side = 2.0;
  double band_halfwidth = 0.5;
  double cap_radius = 0.78539816339744830962; // pi/4

  // Resolutions.
  double mesh_h = 0.04;
  int radial_intervals = 4000;
  int steps_per_decade = 200;
  double t_min_rel = 1e-5; // times the squared diameter
  double t_max = 2.0;

  // Report grids.
  std::vector<double> t_grid{0.05, 0.1, 0.2, 0.5};
  int moment_order = 3;

  // Deformation field and finite differences.
  std::string speed_kind = "cos"; // cos|sin|const
  int speed_mode = 2;
  double speed_amplitude = 1.0;
  std::vector<double> eps_list{0.12, 0.06};
  std::string variation_functional = "heat"; // heat|moment|volume
  double variation_t = 0.2;
  int variation_k = 1;

  // CFP thresholds.
  double cv_threshold = 2e-2;
  double hphi_threshold_rel = 1e-3;

  // Monte Carlo.
  long mc_paths = 100000;
  double mc_step = 1e-4;
  std::vector<double> mc_start{0.0, 0.0}; // flattened (u, v) pairs
  bool mc_bridge = true;

  // Munzner.
  std::string polynomial_file;
  int pq_max = 6;

  std::uint64_t seed = 20240901ull;
  std::string output_dir = "heatlab-out";

  /// Canonical key=value text (sorted keys); hashed into artifact headers.
  std::string canonical() const;
  std::uint64_t hash() const;
  void validate() const; // throws std::invalid_argument on bad values
};

DomainSpec make_domain(const ExperimentConfig& cfg);
TubeProfile make_profile(const ExperimentConfig& cfg);
DeformationField make_speed_field(const ExperimentConfig& cfg);

/// Subcommand runners: write artifacts under cfg.output_dir and return a
/// process exit status (0 = success / all checks passed).
int run_heat(const ExperimentConfig& cfg);
int run_moments(const ExperimentConfig& cfg);
int run_variation(const ExperimentConfig& cfg);
int run_cfp(const ExperimentConfig& cfg);
int run_band_xval(const ExperimentConfig& cfg);
int run_munzner(const ExperimentConfig& cfg);
int run_mc_exit(const ExperimentConfig& cfg);
int run_suite(const ExperimentConfig& cfg);

} // namespace heatlab
