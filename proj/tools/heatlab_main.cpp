// Experiment runner: heat timelines, exit-time moments, shape derivatives,
// constant-flow-property verdicts, tube cross-validation, polynomial
// verification, Monte Carlo exit times, and the full verification battery.
//
//   heatlab <subcommand> [--config run.ini] [flags...]
//
// Flags mirror the config keys; a flag on the command line overrides the
// config file.  Outputs are plain CSV/JSON text stamped with the config hash
// and seed.

#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include "CLI11.hpp"

#include "heatlab/experiment.hpp"

int main(int argc, char** argv) {
  heatlab::ExperimentConfig cfg;

  CLI::App app{"heat content and exit-time moment laboratory"};
  app.set_config("--config", "", "INI config file (sections map to dotted keys)");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--domain.kind", cfg.domain,
                 "disk|ellipse|annulus|square|spherical-cap|spherical-band");
  app.add_option("--profile.name", cfg.profile,
                 "catalog tube profile (1D reduction); overrides domain");
  app.add_option("--domain.radius", cfg.radius, "disk/annulus-outer/profile radius");
  app.add_option("--domain.a", cfg.ellipse_a, "ellipse semi-axis a");
  app.add_option("--domain.b", cfg.ellipse_b, "ellipse semi-axis b");
  app.add_option("--domain.inner-radius", cfg.inner_radius, "annulus inner radius");
  app.add_option("--domain.side", cfg.side, "square side length");
  app.add_option("--domain.band-halfwidth", cfg.band_halfwidth, "band half-width");
  app.add_option("--domain.cap-radius", cfg.cap_radius, "spherical cap geodesic radius");

  app.add_option("--mesh.h", cfg.mesh_h, "target mesh spacing");
  app.add_option("--mesh.radial-intervals", cfg.radial_intervals, "1D grid intervals");
  app.add_option("--time.steps-per-decade", cfg.steps_per_decade, "geometric grid density");
  app.add_option("--time.t-min-rel", cfg.t_min_rel, "first step over squared diameter");
  app.add_option("--time.t-max", cfg.t_max, "time horizon");
  app.add_option("--time.grid", cfg.t_grid, "report times")->expected(-1);

  app.add_option("--moments.order", cfg.moment_order, "hierarchy depth K");

  app.add_option("--field.kind", cfg.speed_kind, "cos|sin|const normal speed");
  app.add_option("--field.mode", cfg.speed_mode, "angular mode");
  app.add_option("--field.amplitude", cfg.speed_amplitude, "speed amplitude");
  app.add_option("--fd.eps", cfg.eps_list, "central-difference offsets")->expected(-1);
  app.add_option("--variation.functional", cfg.variation_functional, "heat|moment|volume");
  app.add_option("--variation.t", cfg.variation_t, "heat-content time");
  app.add_option("--variation.k", cfg.variation_k, "moment order");

  app.add_option("--cfp.cv-threshold", cfg.cv_threshold, "flow uniformity threshold");
  app.add_option("--cfp.hphi-threshold-rel", cfg.hphi_threshold_rel,
                 "weighted-content threshold relative to |Omega|");

  app.add_option("--mc.paths", cfg.mc_paths, "Monte Carlo paths per start");
  app.add_option("--mc.step", cfg.mc_step, "Euler-Maruyama step");
  app.add_option("--mc.start", cfg.mc_start, "start points, flattened (u v) pairs")
      ->expected(-1);
  app.add_flag("--mc.bridge,!--mc.no-bridge", cfg.mc_bridge,
               "Brownian-bridge crossing correction");

  app.add_option("--munzner.file", cfg.polynomial_file, "polynomial file to verify");
  app.add_option("--munzner.pq-max", cfg.pq_max, "verify quadrics with p+q up to this");

  app.add_option("--seed", cfg.seed, "random seed (recorded in every artifact)");
  app.add_option("--out", cfg.output_dir, "output directory");

  std::function<int()> action;
  auto bind = [&](const char* name, const char* desc,
                  int (*fn)(const heatlab::ExperimentConfig&)) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->callback([&action, fn, &cfg]() { action = [fn, &cfg]() { return fn(cfg); }; });
  };
  bind("heat", "heat timeline, flux trace and asymptotic fits", heatlab::run_heat);
  bind("moments", "exit-time hierarchy and moment/heat identities", heatlab::run_moments);
  bind("variation", "analytic vs finite-difference first variation", heatlab::run_variation);
  bind("cfp", "constant flow property indicators", heatlab::run_cfp);
  bind("band-xval", "1D reduction vs 2D surface FEM on the equatorial band",
       heatlab::run_band_xval);
  bind("munzner", "exact Cartan-Munzner polynomial verification", heatlab::run_munzner);
  bind("mc-exit", "Monte Carlo mean exit times", heatlab::run_mc_exit);
  bind("suite", "full verification battery (one pass/fail line per criterion)",
       heatlab::run_suite);

  CLI11_PARSE(app, argc, argv);

  try {
    return action();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
