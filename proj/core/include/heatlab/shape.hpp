#pragma once

#include "heatlab/domain.hpp"
#include "heatlab/heat.hpp"
#include "heatlab/moments.hpp"
#include "heatlab/polynomial.hpp" // Rational
#include "heatlab/tube.hpp"

namespace heatlab {

// ---------------------------------------------------------------------------
// First variations
// ---------------------------------------------------------------------------

enum class FunctionalKind { volume, heat_content, moment };

struct Functional {
  FunctionalKind kind = FunctionalKind::volume;
  double t = 0.0; // heat content time
  int k = 1;      // moment order

  static Functional volume() { return {FunctionalKind::volume, 0.0, 0}; }
  static Functional heat_content(double t) { return {FunctionalKind::heat_content, t, 0}; }
  static Functional moment(int k) { return {FunctionalKind::moment, 0.0, k}; }
};

/// Resolution knobs for functional evaluations on (perturbed) domains.
struct NumericalSetup {
  double mesh_h = 0.04;
  int steps_per_decade = 160;
  double t_min_rel = 1e-5; // times sys.scale2
  int quad_points_B = 96;
};

/// Derivative of the heat content at fixed time t along the boundary field:
/// -integral of <V,N> B(t,y) dsigma, evaluated from the timeline's flux trace.
/// The field must be volume-projected.
double variation_heat_content_analytic(const HeatTimeline& tl, const DeformationField& v,
                                       double t, double* quad_error = nullptr);

/// Derivative of T_k: -integral of <V,N> Phi_k dsigma with
/// Phi_k = sum_j c_kj dE_j/dN dE_{k+1-j}/dN.
double variation_moment_analytic(const AssembledSystem& sys, const MomentTable& table,
                                 const DeformationField& v, int k);

/// c_kj = k! / ((k+1-j)! j!), exact.
Rational moment_variation_coefficient(int k, int j);

/// Unsigned magnitude scale of a boundary variation integrand (for noise
/// floors): integral of |<V,N>| |kernel| dsigma.
double variation_scale(const AssembledSystem& sys, const std::vector<double>& kernel,
                       const DeformationField& v);

struct VariationReport {
  Functional functional;
  double analytic = 0.0;
  std::vector<std::pair<double, double>> eps_sweep; // (eps, central difference)
  double richardson = 0.0;
  double scale = 0.0;   // unsigned integrand scale (zero-case noise floor)
  double rel_gap = 0.0; // |analytic - richardson| / max(|a|,|r|,1e-3*scale)
};

/// Central differences on freshly meshed perturbed domains (no mesh-motion
/// bias), Richardson-extrapolated from the two smallest eps.  eps_list is
/// interpreted as +/- pairs; remeshing failures drop that eps.
VariationReport variation_finite_difference(const DomainSpec& d, const DeformationField& v,
                                            const Functional& f, std::vector<double> eps_list,
                                            const NumericalSetup& setup = {});

// ---------------------------------------------------------------------------
// Rellich identity
// ---------------------------------------------------------------------------

/// Analytic vector field in chart coordinates with its exact Jacobian
/// d X^i / d x^j (row-major [X0_u X0_v X1_u X1_v]).
struct VectorFieldSpec {
  std::function<Vec2(double, double)> X;
  std::function<Mat2(double, double)> jacobian;
};

/// Residual of
///   2 int grad X(grad phi, grad phi)
///     = int (2 <X, grad phi> Lap phi - |grad phi|^2 delta X)
///       - bd int <X,N> (d phi/dN)^2,
/// with phi a Dirichlet field of known positive-Laplacian data.  Returns
/// |LHS - RHS| / max term magnitude.
double rellich_residual(const MeshedDomain& m, const AssembledSystem& sys, const Field& phi,
                        const Vector& laplacian_data, const VectorFieldSpec& X);

// ---------------------------------------------------------------------------
// Constant flow property
// ---------------------------------------------------------------------------

struct CfpConfig {
  std::vector<double> t_samples_rel{0.02, 0.04, 0.08, 0.16, 0.32}; // times scale2
  double cv_threshold = 2e-2;
  double hphi_threshold_rel = 1e-3; // times |Omega|
  int harmonic_modes = 3;           // boundary Fourier modes per loop
  double mesh_h = 0.04;
  int steps_per_decade = 160;
  int quad_points_B = 96;
};

struct CfpVerdict {
  double max_cv_flux = 0.0;
  double max_cv_B = 0.0;
  double hphi_max = 0.0; // sup over basis and t of |H_phi|, phi normalized
  bool is_cfp = false;
  double area = 0.0;
  std::vector<double> t_samples;
  std::vector<double> cv_flux_per_t;
  std::vector<double> cv_B_per_t;
};

/// Three indicators of the constant flow property: flux uniformity, B(t,.)
/// uniformity, and decay of the weighted contents H_phi over a low-frequency
/// zero-mean harmonic basis.
CfpVerdict cfp_test(const DomainSpec& d, const CfpConfig& cfg = {});

/// 1D reduction: the flux is a single scalar per time, so the indicators
/// vanish identically; the verdict records that and is always CFP.
CfpVerdict cfp_test(const TubeProfile& p, const CfpConfig& cfg = {});

} // namespace heatlab
