#pragma once

// Test-side oracles, independent of the library's solver paths: adaptive
// quadrature, Bessel zeros, the disk heat-content series and a plain
// integral-form solver for the radial exit hierarchy.

#include <functional>
#include <vector>

namespace oracles {

/// Adaptive Simpson quadrature to absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

/// m-th positive zero of the Bessel function J_nu (m = 1, 2, ...).
double bessel_zero(double nu, int m);

/// Heat content of the unit disk from the Fourier-Bessel series (modes terms).
double disk_heat_content(double t, int modes = 50);

/// Exit hierarchy on a radial density J over [0, R] by cumulative-trapezoid
/// evaluation of E_k(r) = k int_r^R (1/J) int_0^rho J E_{k-1}; grid of n+1
/// points.  Returns E_k sampled on the uniform grid for k = 1..K.
struct RadialHierarchy {
  std::vector<double> r;
  std::vector<std::vector<double>> E; // E[k-1][i]
  std::vector<double> T;              // integrals of E_k against J dr
};
RadialHierarchy radial_hierarchy(const std::function<double(double)>& J, double R, int K,
                                 int n = 40000);

/// Perimeter of an axis-aligned ellipse via the arclength integrand.
double ellipse_perimeter(double a, double b);

} // namespace oracles
