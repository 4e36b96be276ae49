#include "heatlab/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "heatlab/acceptance.hpp"
#include "heatlab/isoparametric.hpp"
#include "heatlab/mesh.hpp"
#include "heatlab/moments.hpp"
#include "heatlab/montecarlo.hpp"
#include "heatlab/radial.hpp"
#include "heatlab/report.hpp"
#include "heatlab/shape.hpp"

namespace heatlab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string vec_str(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += format_double(x) + ";";
  return s;
}

std::ofstream open_artifact(const ExperimentConfig& cfg, const std::string& name,
                            const std::string& kind, const std::vector<std::string>& notes) {
  fs::create_directories(cfg.output_dir);
  std::ofstream os(fs::path(cfg.output_dir) / name);
  if (!os) throw std::runtime_error("cannot open output file " + name);
  write_artifact_header(os, kind, cfg.hash(), cfg.seed, notes);
  return os;
}

struct Discretization {
  AssembledSystem sys;
  bool radial = false;
};

Discretization discretize(const ExperimentConfig& cfg) {
  if (!cfg.profile.empty())
    return {assemble(RadialGrid::uniform(make_profile(cfg), cfg.radial_intervals)), true};
  return {assemble(mesh_domain(make_domain(cfg), cfg.mesh_h)), false};
}

} // namespace

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["domain.kind"] = domain;
  kv["profile.name"] = profile;
  kv["domain.radius"] = format_double(radius);
  kv["domain.a"] = format_double(ellipse_a);
  kv["domain.b"] = format_double(ellipse_b);
  kv["domain.inner_radius"] = format_double(inner_radius);
  kv["domain.side"] = format_double(side);
  kv["domain.band_halfwidth"] = format_double(band_halfwidth);
  kv["domain.cap_radius"] = format_double(cap_radius);
  kv["mesh.h"] = format_double(mesh_h);
  kv["mesh.radial_intervals"] = std::to_string(radial_intervals);
  kv["time.steps_per_decade"] = std::to_string(steps_per_decade);
  kv["time.t_min_rel"] = format_double(t_min_rel);
  kv["time.t_max"] = format_double(t_max);
  kv["time.grid"] = vec_str(t_grid);
  kv["moments.order"] = std::to_string(moment_order);
  kv["field.kind"] = speed_kind;
  kv["field.mode"] = std::to_string(speed_mode);
  kv["field.amplitude"] = format_double(speed_amplitude);
  kv["fd.eps"] = vec_str(eps_list);
  kv["variation.functional"] = variation_functional;
  kv["variation.t"] = format_double(variation_t);
  kv["variation.k"] = std::to_string(variation_k);
  kv["cfp.cv_threshold"] = format_double(cv_threshold);
  kv["cfp.hphi_threshold_rel"] = format_double(hphi_threshold_rel);
  kv["mc.paths"] = std::to_string(mc_paths);
  kv["mc.step"] = format_double(mc_step);
  kv["mc.start"] = vec_str(mc_start);
  kv["mc.bridge"] = mc_bridge ? "1" : "0";
  kv["munzner.file"] = polynomial_file;
  kv["munzner.pq_max"] = std::to_string(pq_max);
  kv["seed"] = std::to_string(seed);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t ExperimentConfig::hash() const { return config_hash(canonical()); }

void ExperimentConfig::validate() const {
  if (!(mesh_h > 0.0)) throw std::invalid_argument("mesh.h must be positive");
  if (radial_intervals < 8) throw std::invalid_argument("mesh.radial_intervals must be >= 8");
  if (steps_per_decade < 4) throw std::invalid_argument("time.steps_per_decade must be >= 4");
  if (!(t_max > 0.0)) throw std::invalid_argument("time.t_max must be positive");
  if (moment_order < 1) throw std::invalid_argument("moments.order must be >= 1");
  if (mc_paths < 1) throw std::invalid_argument("mc.paths must be >= 1");
  if (!(mc_step > 0.0)) throw std::invalid_argument("mc.step must be positive");
  if (mc_start.size() % 2 != 0) throw std::invalid_argument("mc.start needs (u,v) pairs");
  if (!profile.empty()) {
    catalog_profile(profile, radius); // throws on unknown names
  }
}

DomainSpec make_domain(const ExperimentConfig& cfg) {
  if (cfg.domain == "disk") return DomainSpec::disk(cfg.radius);
  if (cfg.domain == "ellipse") return DomainSpec::ellipse(cfg.ellipse_a, cfg.ellipse_b);
  if (cfg.domain == "annulus") return DomainSpec::annulus(cfg.inner_radius, cfg.radius);
  if (cfg.domain == "square")
    return DomainSpec::rectangle({-cfg.side / 2, -cfg.side / 2}, {cfg.side / 2, cfg.side / 2});
  if (cfg.domain == "spherical-cap")
    return DomainSpec::geodesic_cap(AmbientChart::sphere(), {1.57079632679489661923, 3.0},
                                    cfg.cap_radius);
  if (cfg.domain == "spherical-band")
    return DomainSpec::spherical_band(1.57079632679489661923 - cfg.band_halfwidth,
                                      1.57079632679489661923 + cfg.band_halfwidth);
  throw std::invalid_argument("unknown domain kind: " + cfg.domain);
}

TubeProfile make_profile(const ExperimentConfig& cfg) {
  return catalog_profile(cfg.profile, cfg.radius);
}

DeformationField make_speed_field(const ExperimentConfig& cfg) {
  if (cfg.speed_kind == "const") return DeformationField::constant(cfg.speed_amplitude);
  if (cfg.speed_kind == "cos")
    return DeformationField::harmonic(cfg.speed_mode, false, cfg.speed_amplitude);
  if (cfg.speed_kind == "sin")
    return DeformationField::harmonic(cfg.speed_mode, true, cfg.speed_amplitude);
  throw std::invalid_argument("unknown field kind: " + cfg.speed_kind);
}

int run_heat(const ExperimentConfig& cfg) {
  cfg.validate();
  const Discretization d = discretize(cfg);
  const AssembledSystem& sys = d.sys;
  const TimeGrid grid =
      TimeGrid::geometric(cfg.t_min_rel * sys.scale2, cfg.t_max, cfg.steps_per_decade);
  HeatOptions opt;
  opt.record_fields = false;
  const HeatTimeline tl = solve_heat(sys, grid, opt);

  auto content = open_artifact(cfg, "timeline.csv", "heat content timeline",
                               {"columns: t, H(t)  [chart-area units]"});
  for (std::size_t j = 0; j < tl.times.size(); ++j)
    write_csv_row(content, {tl.times[j], tl.content[j]});

  auto fluxcsv = open_artifact(cfg, "flux_trace.csv", "boundary heat flow trace",
                               {"columns: t, boundary node id, du/dN"});
  for (std::size_t j = 1; j < tl.times.size(); ++j)
    for (std::size_t b = 0; b < tl.flux[j].size(); ++b)
      write_csv_row(fluxcsv, {tl.times[j], static_cast<double>(b), tl.flux[j][b]});

  const AsymptoticFit fit = fit_asymptotics(tl);
  const EigenPair ep = smallest_eigenpair(sys);
  json rep;
  rep["area_hat"] = fit.area_hat;
  rep["beta1_hat"] = fit.beta1_hat;
  rep["beta2_hat"] = fit.beta2_hat;
  rep["lambda1_hat"] = fit.lambda1_hat;
  rep["c2_hat"] = fit.c2_hat;
  rep["lambda1_eigensolver"] = ep.lambda;
  rep["area_quadrature"] = sys.area;
  rep["small_window"] = {fit.small_window[0], fit.small_window[1]};
  rep["large_window"] = {fit.large_window[0], fit.large_window[1]};
  rep["area_sensitivity"] = fit.area_sensitivity;
  rep["beta1_sensitivity"] = fit.beta1_sensitivity;
  auto fits = open_artifact(cfg, "fits.json", "asymptotic fit report", {});
  fits << rep.dump(2) << "\n";
  return 0;
}

int run_moments(const ExperimentConfig& cfg) {
  cfg.validate();
  const Discretization d = discretize(cfg);
  const AssembledSystem& sys = d.sys;
  const MomentTable table = exit_hierarchy(sys, cfg.moment_order);

  auto mcsv = open_artifact(cfg, "moments.csv", "exit-time moment table",
                            {"columns: k, T_k, min flux, max flux, flux cv",
                             "per-unit-soul-volume for tube profiles"});
  for (int k = 1; k <= table.K; ++k) {
    const FluxStats st = flux_statistics(sys, table.flux[k - 1]);
    write_csv_row(mcsv, {static_cast<double>(k), table.T[k - 1], st.min, st.max, st.cv});
  }

  const EigenPair ep = smallest_eigenpair(sys);
  const TimeGrid grid =
      TimeGrid::geometric(cfg.t_min_rel * sys.scale2, cfg.t_max, cfg.steps_per_decade);
  const HeatTimeline tl = solve_heat(sys, grid);
  auto icsv = open_artifact(cfg, "identity.csv", "moment vs heat-content identity",
                            {"columns: k, relative discrepancy, tail contribution"});
  for (int k = 1; k <= std::min(table.K, 3); ++k) {
    const MomentHeatCheck chk = verify_moment_heat_identity(table, tl, k, ep.lambda);
    write_csv_row(icsv, {static_cast<double>(k), chk.discrepancy, chk.tail});
  }
  return 0;
}

int run_variation(const ExperimentConfig& cfg) {
  cfg.validate();
  const DomainSpec dom = make_domain(cfg);
  DeformationField v = make_speed_field(cfg);
  if (cfg.variation_functional != "volume") v = project_volume_preserving(v, dom);

  Functional f = Functional::volume();
  if (cfg.variation_functional == "heat")
    f = Functional::heat_content(cfg.variation_t);
  else if (cfg.variation_functional == "moment")
    f = Functional::moment(cfg.variation_k);
  else if (cfg.variation_functional != "volume")
    throw std::invalid_argument("unknown variation functional: " + cfg.variation_functional);

  NumericalSetup setup;
  setup.mesh_h = cfg.mesh_h;
  setup.steps_per_decade = cfg.steps_per_decade;
  setup.t_min_rel = cfg.t_min_rel;
  const VariationReport rep = variation_finite_difference(dom, v, f, cfg.eps_list, setup);

  auto sweep = open_artifact(cfg, "eps_sweep.csv", "central-difference sweep",
                             {"columns: eps, (F(+eps)-F(-eps))/(2 eps)"});
  for (const auto& [e, dd] : rep.eps_sweep) write_csv_row(sweep, {e, dd});

  json j;
  j["functional"] = cfg.variation_functional;
  j["t"] = cfg.variation_t;
  j["k"] = cfg.variation_k;
  j["analytic"] = rep.analytic;
  j["richardson"] = rep.richardson;
  j["rel_gap"] = rep.rel_gap;
  j["scale"] = rep.scale;
  auto out = open_artifact(cfg, "variation.json", "first-variation report", {});
  out << j.dump(2) << "\n";
  return 0;
}

int run_cfp(const ExperimentConfig& cfg) {
  cfg.validate();
  CfpConfig c;
  c.cv_threshold = cfg.cv_threshold;
  c.hphi_threshold_rel = cfg.hphi_threshold_rel;
  c.mesh_h = cfg.mesh_h;
  c.steps_per_decade = std::min(cfg.steps_per_decade, 200);
  const CfpVerdict verdict =
      cfg.profile.empty() ? cfp_test(make_domain(cfg), c) : cfp_test(make_profile(cfg), c);

  auto tcsv = open_artifact(cfg, "cfp_indicators.csv", "per-time flow uniformity",
                            {"columns: t, cv of du/dN, cv of B(t,.)"});
  for (std::size_t i = 0; i < verdict.t_samples.size(); ++i)
    write_csv_row(tcsv, {verdict.t_samples[i], verdict.cv_flux_per_t[i], verdict.cv_B_per_t[i]});

  json j;
  j["max_cv_flux"] = verdict.max_cv_flux;
  j["max_cv_B"] = verdict.max_cv_B;
  j["hphi_max"] = verdict.hphi_max;
  j["area"] = verdict.area;
  j["cv_threshold"] = cfg.cv_threshold;
  j["hphi_threshold"] = cfg.hphi_threshold_rel * verdict.area;
  j["is_cfp"] = verdict.is_cfp;
  auto out = open_artifact(cfg, "cfp.json", "constant flow property verdict", {});
  out << j.dump(2) << "\n";
  std::cout << (verdict.is_cfp ? "CFP: yes" : "CFP: no") << "  (cv_flux " << verdict.max_cv_flux
            << ", cv_B " << verdict.max_cv_B << ", hphi " << verdict.hphi_max << ")\n";
  return 0;
}

int run_band_xval(const ExperimentConfig& cfg) {
  cfg.validate();
  BandResolutions res;
  res.h2d = cfg.mesh_h;
  res.radial_intervals = cfg.radial_intervals;
  res.steps_per_decade = std::min(cfg.steps_per_decade, 160);
  res.t_max = cfg.t_max;
  if (!cfg.t_grid.empty()) res.times = cfg.t_grid;
  const BandCrossValidation xv = cross_validate_band(cfg.band_halfwidth, res);

  auto csv = open_artifact(cfg, "band_xval.csv", "1D vs 2D cross-validation",
                           {"columns: t, H radial, H fem (per unit soul volume), rel gap"});
  for (std::size_t i = 0; i < xv.times.size(); ++i)
    write_csv_row(csv, {xv.times[i], xv.H_radial[i], xv.H_fem[i], xv.H_gap[i]});

  json j;
  j["T1_radial"] = xv.T1_radial;
  j["T1_fem"] = xv.T1_fem;
  j["T1_gap"] = xv.T1_gap;
  j["E1_mid_gap"] = xv.E1_gap;
  j["flux_gap"] = xv.flux_gap;
  j["flux_fem_cv"] = xv.flux_fem_cv;
  j["max_H_gap"] = xv.max_H_gap;
  auto out = open_artifact(cfg, "band_xval.json", "band cross-validation report", {});
  out << j.dump(2) << "\n";
  return 0;
}

int run_munzner(const ExperimentConfig& cfg) {
  cfg.validate();
  auto report_one = [&](const std::string& label, const HomogeneousPolynomial& F,
                        std::ostream& os) {
    const MunznerVerdict v = munzner_verify(F);
    os << label << ": g=" << v.g << " gradient=" << (v.gradient_ok ? "pass" : "FAIL")
       << " laplacian=" << (v.laplacian_ok ? "pass" : "FAIL") << " c=" << v.c
       << " c!=(n-1)g=" << (v.c_differs_from_bound ? "yes" : "no");
    if (v.witness) {
      os << " witness=";
      for (int e : v.witness->first) os << e << ".";
      os << " coeff=" << v.witness->second;
    }
    os << "\n";
    return v.pass();
  };

  auto out = open_artifact(cfg, "munzner.txt", "Cartan-Munzner polynomial verdicts", {});
  bool all = true;
  if (!cfg.polynomial_file.empty()) {
    std::ifstream is(cfg.polynomial_file);
    if (!is) throw std::invalid_argument("cannot read polynomial file " + cfg.polynomial_file);
    const HomogeneousPolynomial F = HomogeneousPolynomial::read(is);
    all = report_one(cfg.polynomial_file, F, out);
    const MunznerVerdict v = munzner_verify(F);
    std::cout << (v.pass() ? "pass" : "FAIL") << ", c = " << v.c << "\n";
  } else {
    HomogeneousPolynomial height(3, 1);
    height.add_term({0, 0, 1}, 1);
    all = report_one("height-function g=1", height, out) && all;
    for (int p = 1; p <= cfg.pq_max - 1; ++p)
      for (int q = 1; p + q <= cfg.pq_max; ++q) {
        std::ostringstream label;
        label << "quadric p=" << p << " q=" << q;
        all = report_one(label.str(), clifford_quadric(p, q), out) && all;
      }
  }
  return all ? 0 : 1;
}

int run_mc_exit(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Vec2> starts;
  for (std::size_t i = 0; i + 1 < cfg.mc_start.size(); i += 2)
    starts.push_back({cfg.mc_start[i], cfg.mc_start[i + 1]});
  if (starts.empty()) starts.push_back({0.0, 0.0});
  McOptions opt;
  opt.seed = cfg.seed;
  opt.bridge_correction = cfg.mc_bridge;
  const auto results = mc_mean_exit(make_domain(cfg), starts, cfg.mc_paths, cfg.mc_step, opt);
  auto csv = open_artifact(cfg, "mc_exit.csv", "Monte Carlo mean exit times",
                           {"columns: start u, start v, mean, stderr, paths, capped"});
  for (const auto& r : results)
    write_csv_row(csv, {r.start[0], r.start[1], r.mean, r.std_error,
                        static_cast<double>(r.paths), static_cast<double>(r.capped)});
  return 0;
}

int run_suite(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto results = run_acceptance_battery(std::cout);
  auto csv = open_artifact(cfg, "suite.csv", "acceptance battery results",
                           {"columns: id, pass, seconds, name"});
  for (const auto& r : results)
    csv << r.id << "," << (r.pass ? 1 : 0) << "," << format_double(r.seconds) << ",\"" << r.name
        << "\"\n";
  return all_passed(results) ? 0 : 1;
}

} // namespace heatlab
