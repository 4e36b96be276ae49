#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                double fb, double whole, double tol, int depth) {
  const double m = (a + b) / 2;
  const double lm = (a + m) / 2, rm = (m + b) / 2;
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f((a + b) / 2);
  return adaptive(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb), tol, 48);
}

double bessel_zero(double nu, int m) {
  // Bracket by stepping past sign changes of J_nu, then bisect.
  int found = 0;
  double prev_x = nu + 1e-8, prev = std::cyl_bessel_j(nu, prev_x);
  for (double x = prev_x + 0.05; x < 1000.0; x += 0.05) {
    const double val = std::cyl_bessel_j(nu, x);
    if (prev * val < 0.0) {
      ++found;
      if (found == m) {
        double lo = prev_x, hi = x;
        for (int it = 0; it < 200; ++it) {
          const double mid = (lo + hi) / 2;
          const double fm = std::cyl_bessel_j(nu, mid);
          if (fm * std::cyl_bessel_j(nu, lo) <= 0.0)
            hi = mid;
          else
            lo = mid;
        }
        return (lo + hi) / 2;
      }
    }
    prev = val;
    prev_x = x;
  }
  throw std::runtime_error("bessel zero not found");
}

double disk_heat_content(double t, int modes) {
  // H(t) = sum_m 4 pi / j_{0,m}^2 e^{-j_{0,m}^2 t}.
  double acc = 0.0;
  for (int m = 1; m <= modes; ++m) {
    const double j = bessel_zero(0.0, m);
    acc += 4.0 * 3.14159265358979323846 / (j * j) * std::exp(-j * j * t);
  }
  return acc;
}

RadialHierarchy radial_hierarchy(const std::function<double(double)>& J, double R, int K, int n) {
  RadialHierarchy out;
  out.r.resize(n + 1);
  std::vector<double> Jv(n + 1);
  const double h = R / n;
  for (int i = 0; i <= n; ++i) {
    out.r[i] = h * i;
    Jv[i] = J(out.r[i]);
  }
  std::vector<double> Ek(n + 1, 1.0); // E_0
  for (int k = 1; k <= K; ++k) {
    // inner(rho) = int_0^rho J * k * E_{k-1}
    std::vector<double> inner(n + 1, 0.0);
    for (int i = 1; i <= n; ++i)
      inner[i] = inner[i - 1] +
                 0.5 * h * (Jv[i - 1] * k * Ek[i - 1] + Jv[i] * k * Ek[i]);
    // E_k(r) = int_r^R inner/J  (the flux J E' = -inner integrates to this)
    std::vector<double> Enew(n + 1, 0.0);
    for (int i = n - 1; i >= 0; --i) {
      const double gi = Jv[i] > 0.0 ? inner[i] / Jv[i] : 0.0;
      const double gi1 = Jv[i + 1] > 0.0 ? inner[i + 1] / Jv[i + 1] : 0.0;
      Enew[i] = Enew[i + 1] + 0.5 * h * (gi + gi1);
    }
    double T = 0.0;
    for (int i = 1; i <= n; ++i)
      T += 0.5 * h * (Jv[i - 1] * Enew[i - 1] + Jv[i] * Enew[i]);
    out.E.push_back(Enew);
    out.T.push_back(T);
    Ek = std::move(Enew);
  }
  return out;
}

double ellipse_perimeter(double a, double b) {
  return integrate(
      [a, b](double t) {
        const double s = std::sin(t), c = std::cos(t);
        return std::sqrt(a * a * s * s + b * b * c * c);
      },
      0.0, 2.0 * 3.14159265358979323846, 1e-12);
}

} // namespace oracles
