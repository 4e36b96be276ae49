#pragma once

#include "heatlab/fem.hpp"

namespace heatlab {

struct TimeGrid {
  std::vector<double> times; // t_0 = 0 < t_1 < ... < t_J
  /// Geometric grid t_j = t_min * rho^j with ~steps_per_decade steps per
  /// decade, preceded by t_0 = 0.
  static TimeGrid geometric(double t_min, double t_max, int steps_per_decade = 200);
};

struct HeatOptions {
  int implicit_euler_steps = 5;   // damp the incompatible initial layer
  double overshoot_tol = 1e-6;    // nodal rejection band beyond [0,1]
  bool enforce_bounds = true;     // only meaningful for the unit initial data
  bool record_fields = true;      // keep full temperature snapshots
  bool record_flux = true;        // recover the boundary flux trace
};

/// Temperature evolution with Dirichlet boundary: fields, heat content H(t)
/// and the boundary heat-flow trace dU/dN (inner normal, positive).
struct HeatTimeline {
  const AssembledSystem* sys = nullptr;
  std::vector<double> times;
  std::vector<Vector> fields;             // empty if record_fields = false
  std::vector<double> content;            // H(t_j); H(0) = |Omega|
  std::vector<std::vector<double>> flux;  // flux[j][b] for j >= 1

  double content_at(double t) const; // log-time interpolation
};

/// Crank-Nicolson on the geometric grid (first steps implicit Euler); the
/// flux trace is recovered variationally with data -du/dt (backward
/// difference).  initial = nullptr means unit initial temperature.
HeatTimeline solve_heat(const AssembledSystem& sys, const TimeGrid& grid,
                        const HeatOptions& opt = {}, const Vector* initial = nullptr);

/// H_phi(t_j) = integral of phi * u(t_j) dv.
std::vector<double> weighted_content(const HeatTimeline& tl, const Vector& phi);

/// B(t,y) = int_0^t flux(tau,y) flux(t-tau,y) dtau per boundary node, via the
/// tau = t sin^2(theta) substitution (bounded integrand).  error_estimate, if
/// given, receives a quadrature refinement delta.
std::vector<double> convolution_B(const HeatTimeline& tl, double t, int quad_points = 96,
                                  double* error_estimate = nullptr);

/// Amplitude C of the exponential tail f ~ C e^{-lambda1 t} fitted over the
/// trailing decade; quality is the max relative deviation in the window.
struct TailFit {
  double amplitude = 0.0;
  double quality = 0.0;
};
TailFit fit_tail_amplitude(const std::vector<double>& times, const std::vector<double>& f,
                           double lambda1, double decades = 1.0);

struct LaplaceResult {
  double value = 0.0;
  double tail = 0.0;       // analytic tail contribution
  double quad_error = 0.0; // coarsening estimate
};

/// int_0^inf e^{-st} f(t) dt with the tail beyond the computed horizon taken
/// from the exponential decay law.  Requires s > -lambda1.
LaplaceResult laplace_transform(const std::vector<double>& times, const std::vector<double>& f,
                                double s, double lambda1);

/// int_0^inf t^{k-1} f(t) dt with the same tail completion (k >= 1 integer).
LaplaceResult weighted_time_integral(const std::vector<double>& times,
                                     const std::vector<double>& f, int k, double lambda1);

struct AsymptoticFit {
  double area_hat = 0.0;    // constant term of the small-time fit
  double beta1_hat = 0.0;   // sqrt(t) coefficient
  double beta2_hat = 0.0;   // t coefficient
  double lambda1_hat = 0.0; // large-time decay rate
  double c2_hat = 0.0;      // large-time amplitude
  double area_sensitivity = 0.0;  // window-halving deltas
  double beta1_sensitivity = 0.0;
  double small_window[2] = {0.0, 0.0};
  double large_window[2] = {0.0, 0.0};
};

struct FitOptions {
  // Small-time window in units of sys->scale2; must clear the mesh layer.
  double small_lo_rel = 5e-4;
  double small_hi_rel = 5e-3;
  double large_decades = 1.0; // trailing decades for the exponential fit
};

/// Least-squares H ~ a + b sqrt(t) + c t on the small-time window and an
/// exponential fit on the trailing window, with window-sensitivity
/// diagnostics.  Throws if a window holds fewer than 8 samples.
AsymptoticFit fit_asymptotics(const HeatTimeline& tl, const FitOptions& opt = {});

} // namespace heatlab
