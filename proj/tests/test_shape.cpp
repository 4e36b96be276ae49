#include "doctest.h"

#include <cmath>

#include "heatlab/isoparametric.hpp"
#include "heatlab/shape.hpp"

using namespace heatlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("moment variation coefficients are exact rationals") {
  CHECK(moment_variation_coefficient(1, 1) == Rational(1));
  CHECK(moment_variation_coefficient(2, 1) == Rational(1));
  CHECK(moment_variation_coefficient(2, 2) == Rational(1));
  CHECK(moment_variation_coefficient(3, 1) == Rational(1));
  CHECK(moment_variation_coefficient(3, 3) == Rational(1));
  // k!/((k+1-j)! j!) at k=3, j=2 is 6/(2!*2!) = 3/2.
  CHECK(moment_variation_coefficient(3, 2) == Rational(3, 2));
  CHECK(moment_variation_coefficient(6, 3) == Rational(720, 24 * 6));
  CHECK_THROWS(moment_variation_coefficient(2, 3));
}

TEST_CASE("disk variations vanish for zero-mean fields") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  const DeformationField v = project_volume_preserving(DeformationField::harmonic(2), disk);

  const MeshedDomain m = triangulate(disk, 0.045);
  const AssembledSystem sys = assemble(m);
  const MomentTable table = exit_hierarchy(sys, 1);
  const double dT1 = variation_moment_analytic(sys, table, v, 1);
  std::vector<double> Phi(sys.n_boundary());
  for (int b = 0; b < sys.n_boundary(); ++b) Phi[b] = table.flux[0][b] * table.flux[0][b];
  const double scale = variation_scale(sys, Phi, v);
  CHECK(std::abs(dT1) <= 1e-3 * scale);

  const HeatTimeline tl = solve_heat(sys, TimeGrid::geometric(1e-5 * sys.scale2, 0.3, 140));
  const double dH = variation_heat_content_analytic(tl, v, 0.2);
  const std::vector<double> B = convolution_B(tl, 0.2);
  const double hscale = variation_scale(sys, B, v);
  CHECK(std::abs(dH) <= 1e-3 * hscale);

  // v = 0 gives exactly zero.
  const DeformationField zero(
      [](int, double) { return 0.0; }, true);
  CHECK(variation_heat_content_analytic(tl, zero, 0.2) == 0.0);

  // Unprojected fields are rejected.
  CHECK_THROWS(variation_heat_content_analytic(tl, DeformationField::harmonic(2), 0.2));
}

TEST_CASE("zero-mean invariance: constants added before projection do not matter") {
  const DomainSpec ell = DomainSpec::ellipse(1.2, 0.8);
  const MeshedDomain m = triangulate(ell, 0.05);
  const AssembledSystem sys = assemble(m);
  const MomentTable table = exit_hierarchy(sys, 2);

  const DeformationField raw = DeformationField::harmonic(2);
  const DeformationField shifted(
      [](int, double th) { return std::cos(2 * th) + 0.7; });
  const DeformationField p1 = project_volume_preserving(raw, ell);
  const DeformationField p2 = project_volume_preserving(shifted, ell);
  for (int k : {1, 2}) {
    const double a = variation_moment_analytic(sys, table, p1, k);
    const double b = variation_moment_analytic(sys, table, p2, k);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("volume variation: finite differences see the boundary measure") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  const DeformationField v = DeformationField::constant(1.0); // unprojected, inward
  NumericalSetup setup;
  setup.mesh_h = 0.05;
  const VariationReport rep =
      variation_finite_difference(disk, v, Functional::volume(), {0.02, 0.01}, setup);
  // Speed +1 along the inner normal shrinks the disk: derivative -|boundary|.
  CHECK(rep.analytic == doctest::Approx(-2 * kPi).epsilon(1e-4));
  CHECK(std::abs(rep.richardson) == doctest::Approx(2 * kPi).epsilon(5e-3));
  CHECK(rep.richardson * rep.analytic > 0.0);
}

TEST_CASE("moment variation matches finite differences on the ellipse") {
  const DomainSpec ell = DomainSpec::ellipse(1.2, 0.8);
  const DeformationField v =
      project_volume_preserving(DeformationField::harmonic(2), ell);
  NumericalSetup setup;
  setup.mesh_h = 0.04;
  const VariationReport rep =
      variation_finite_difference(ell, v, Functional::moment(1), {0.12, 0.06}, setup);
  CHECK(rep.rel_gap <= 5e-2);
}

TEST_CASE("heat content variation matches finite differences on the ellipse") {
  const DomainSpec ell = DomainSpec::ellipse(1.2, 0.8);
  const DeformationField v =
      project_volume_preserving(DeformationField::harmonic(2), ell);
  NumericalSetup setup;
  setup.mesh_h = 0.045;
  setup.steps_per_decade = 140;
  const VariationReport rep =
      variation_finite_difference(ell, v, Functional::heat_content(0.2), {0.12, 0.06}, setup);
  CHECK(rep.rel_gap <= 5e-2);
}

TEST_CASE("disk criticality: T_1 finite difference sits at the noise floor") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  const DeformationField v =
      project_volume_preserving(DeformationField::harmonic(3), disk);
  NumericalSetup setup;
  setup.mesh_h = 0.04;
  const VariationReport rep =
      variation_finite_difference(disk, v, Functional::moment(1), {0.12, 0.06}, setup);
  CHECK(std::abs(rep.analytic) <= 1e-3 * rep.scale);
  CHECK(std::abs(rep.richardson) <= 1e-3 * rep.scale);
}

TEST_CASE("rellich identity: disk torsion with the radial field") {
  const MeshedDomain m = triangulate(DomainSpec::disk(1.0), 0.02);
  const AssembledSystem sys = assemble(m);
  DirichletSolver solver(sys);
  const Vector ones = Vector::Ones(sys.n_full());
  const Field E1 = solver.solve_poisson(ones);
  VectorFieldSpec X;
  X.X = [](double u, double v) { return Vec2{u, v}; };
  X.jacobian = [](double, double) { return Mat2{1, 0, 0, 1}; };
  const double res = rellich_residual(m, sys, E1, ones, X);
  CHECK(res <= 2e-2);

  // Residual decreases under refinement.
  const MeshedDomain mc = triangulate(DomainSpec::disk(1.0), 0.04);
  const AssembledSystem sc = assemble(mc);
  DirichletSolver solc(sc);
  const Vector onesc = Vector::Ones(sc.n_full());
  const double res_coarse = rellich_residual(mc, sc, solc.solve_poisson(onesc), onesc, X);
  CHECK(res < res_coarse);

  // X = 0 gives zero on both sides.
  VectorFieldSpec Z;
  Z.X = [](double, double) { return Vec2{0, 0}; };
  Z.jacobian = [](double, double) { return Mat2{0, 0, 0, 0}; };
  CHECK(rellich_residual(m, sys, E1, ones, Z) == 0.0);
}

TEST_CASE("rellich identity: square eigenfunction with a translation field") {
  const MeshedDomain m = triangulate(DomainSpec::rectangle({0, 0}, {1, 1}), 0.02);
  const AssembledSystem sys = assemble(m);
  const EigenPair ep = smallest_eigenpair(sys);
  const Vector data = ep.lambda * ep.phi.values;
  VectorFieldSpec X;
  X.X = [](double, double) { return Vec2{1.0, 0.0}; };
  X.jacobian = [](double, double) { return Mat2{0, 0, 0, 0}; };
  CHECK(rellich_residual(m, sys, ep.phi, data, X) <= 2e-2);
}

TEST_CASE("cfp verdicts: disk true, ellipse false, tube profile true") {
  CfpConfig cfg;
  cfg.mesh_h = 0.05;
  const CfpVerdict disk = cfp_test(DomainSpec::disk(1.0), cfg);
  CHECK(disk.is_cfp);
  CHECK(disk.max_cv_flux <= cfg.cv_threshold);

  const CfpVerdict ell = cfp_test(DomainSpec::ellipse(1.2, 0.8), cfg);
  CHECK_FALSE(ell.is_cfp);
  CHECK(ell.hphi_max >= 5.0 * cfg.hphi_threshold_rel * ell.area);
  CHECK(ell.max_cv_flux >= 5.0 * cfg.cv_threshold);
  CHECK(ell.max_cv_B >= 5.0 * cfg.cv_threshold);

  const CfpVerdict tube = cfp_test(catalog_profile("s2-equator-tube", 0.5), cfg);
  CHECK(tube.is_cfp);
  CHECK(tube.max_cv_flux == 0.0);
}
