#include "heatlab/heat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace heatlab {

namespace {
constexpr double kPi = 3.14159265358979323846;

SparseMat reduce_matrix(const AssembledSystem& sys, const SparseMat& A) {
  std::vector<Eigen::Triplet<double>> tr;
  tr.reserve(A.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it) {
      const int i = sys.full_to_reduced[it.row()];
      const int j = sys.full_to_reduced[it.col()];
      if (i >= 0 && j >= 0) tr.emplace_back(i, j, it.value());
    }
  SparseMat R(sys.n_reduced(), sys.n_reduced());
  R.setFromTriplets(tr.begin(), tr.end());
  return R;
}

} // namespace

TimeGrid TimeGrid::geometric(double t_min, double t_max, int steps_per_decade) {
  if (!(t_min > 0.0) || !(t_max > t_min)) throw std::invalid_argument("bad time grid bounds");
  if (steps_per_decade < 4) throw std::invalid_argument("steps_per_decade must be >= 4");
  TimeGrid g;
  g.times.push_back(0.0);
  const double rho = std::pow(10.0, 1.0 / steps_per_decade);
  double t = t_min;
  while (t < t_max * (1.0 - 1e-12)) {
    g.times.push_back(t);
    t *= rho;
  }
  g.times.push_back(t_max);
  return g;
}

double HeatTimeline::content_at(double t) const {
  if (t <= times.front()) return content.front();
  if (t >= times.back()) return content.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times.begin());
  const double t0 = times[j - 1], t1 = times[j];
  // Log-time interpolation away from zero, linear near it.
  if (t0 > 0.0) {
    const double w = std::log(t / t0) / std::log(t1 / t0);
    return content[j - 1] * (1.0 - w) + content[j] * w;
  }
  const double w = (t - t0) / (t1 - t0);
  return content[j - 1] * (1.0 - w) + content[j] * w;
}

HeatTimeline solve_heat(const AssembledSystem& sys, const TimeGrid& grid, const HeatOptions& opt,
                        const Vector* initial) {
  if (grid.times.size() < 2 || grid.times.front() != 0.0)
    throw std::invalid_argument("time grid must start at 0 with at least one step");

  HeatTimeline tl;
  tl.sys = &sys;
  tl.times = grid.times;

  const Vector u0_full = initial ? *initial : Vector::Ones(sys.n_full());
  Vector u = sys.reduce(u0_full); // Dirichlet rows pinned to zero
  const SparseMat Sr = reduce_matrix(sys, sys.S);
  // Row-sum lumped mass in the stepping operator: with the consistent mass
  // the discrete solution overshoots the maximum principle at steps far below
  // the mesh scale.  Row sums are preserved, so content quadratures agree.
  const Vector lumped_full = sys.M * Vector::Ones(sys.n_full());
  SparseMat Mr(sys.n_reduced(), sys.n_reduced());
  {
    std::vector<Eigen::Triplet<double>> tr;
    tr.reserve(sys.n_reduced());
    for (int i = 0; i < sys.n_reduced(); ++i)
      tr.emplace_back(i, i, lumped_full[sys.reduced_to_full[i]]);
    Mr.setFromTriplets(tr.begin(), tr.end());
  }

  Eigen::SimplicialLDLT<SparseMat> ldlt;
  ldlt.analyzePattern(SparseMat(Mr + Sr));

  FluxRecovery flux_rec(sys);

  tl.content.push_back(sys.quadrature(u0_full));
  if (opt.record_fields) tl.fields.push_back(u0_full);
  if (opt.record_flux) tl.flux.emplace_back(sys.n_boundary(), 0.0);

  Vector prev_full = sys.expand(u);
  const std::size_t steps = grid.times.size() - 1;
  for (std::size_t j = 1; j <= steps; ++j) {
    const double dt = grid.times[j] - grid.times[j - 1];
    const double theta = (static_cast<int>(j) <= opt.implicit_euler_steps) ? 1.0 : 0.5;
    SparseMat A = Mr + theta * dt * Sr;
    ldlt.factorize(A);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("heat step factorization failed at step " + std::to_string(j));
    Vector rhs = Mr * u;
    if (theta < 1.0) rhs -= ((1.0 - theta) * dt) * (Sr * u);
    u = ldlt.solve(rhs);

    if (opt.enforce_bounds && !initial) {
      const double lo = u.minCoeff(), hi = u.maxCoeff();
      if (lo < -opt.overshoot_tol || hi > 1.0 + opt.overshoot_tol)
        throw std::runtime_error("time step " + std::to_string(j) +
                                 " rejected: nodal overshoot [" + std::to_string(lo) + "," +
                                 std::to_string(hi) + "]");
    }

    const Vector u_full = sys.expand(u);
    tl.content.push_back(sys.quadrature(u_full));
    if (opt.record_flux) {
      const Vector f = -(u_full - prev_full) / dt; // positive-Laplacian data
      tl.flux.push_back(flux_rec.recover(u_full, f));
    }
    if (opt.record_fields) tl.fields.push_back(u_full);
    prev_full = u_full;
  }
  return tl;
}

std::vector<double> weighted_content(const HeatTimeline& tl, const Vector& phi) {
  if (tl.fields.empty()) throw std::invalid_argument("timeline has no stored fields");
  if (phi.size() != tl.sys->n_full()) throw std::invalid_argument("mesh mismatch for phi");
  const Vector Mphi = tl.sys->M * phi;
  std::vector<double> out;
  out.reserve(tl.fields.size());
  for (const auto& u : tl.fields) out.push_back(Mphi.dot(u));
  return out;
}

namespace {

// Interpolates z(tau) = flux(tau) sqrt(tau), which is bounded near tau = 0 by
// the 1/sqrt(pi t) law; linear in log(tau), frozen below the first step.
class FluxTrace {
 public:
  FluxTrace(const HeatTimeline& tl, std::size_t b) : tl_(tl), b_(b) {}

  double z(double tau) const {
    const auto& t = tl_.times;
    if (tau <= t[1]) return tl_.flux[1][b_] * std::sqrt(t[1]);
    const auto it = std::upper_bound(t.begin(), t.end(), tau);
    std::size_t j = static_cast<std::size_t>(it - t.begin());
    j = std::min(j, t.size() - 1);
    const double t0 = t[j - 1], t1 = t[j];
    const double z0 = tl_.flux[j - 1][b_] * std::sqrt(t0);
    const double z1 = tl_.flux[j][b_] * std::sqrt(t1);
    const double w = std::log(tau / t0) / std::log(t1 / t0);
    return z0 * (1.0 - w) + z1 * w;
  }

 private:
  const HeatTimeline& tl_;
  std::size_t b_;
};

std::vector<double> convolution_pass(const HeatTimeline& tl, double t, int n) {
  const std::size_t nb = tl.flux[1].size();
  std::vector<double> B(nb, 0.0);
  const double dtheta = (kPi / 2) / n;
  for (std::size_t b = 0; b < nb; ++b) {
    FluxTrace trace(tl, b);
    double acc = 0.0;
    for (int q = 0; q < n; ++q) {
      const double theta = (q + 0.5) * dtheta;
      const double s = std::sin(theta);
      const double tau = t * s * s;
      acc += 2.0 * trace.z(tau) * trace.z(t - tau);
    }
    B[b] = acc * dtheta;
  }
  return B;
}

} // namespace

std::vector<double> convolution_B(const HeatTimeline& tl, double t, int quad_points,
                                  double* error_estimate) {
  if (tl.flux.size() != tl.times.size() || tl.flux.size() < 3)
    throw std::invalid_argument("timeline has no flux trace");
  if (!(t > 0.0) || t > tl.times.back())
    throw std::invalid_argument("convolution time outside the timeline range");
  std::vector<double> fine = convolution_pass(tl, t, quad_points);
  if (error_estimate) {
    const std::vector<double> coarse = convolution_pass(tl, t, quad_points / 2);
    double e = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) e = std::max(e, std::abs(fine[i] - coarse[i]));
    *error_estimate = e;
  }
  return fine;
}

TailFit fit_tail_amplitude(const std::vector<double>& times, const std::vector<double>& f,
                           double lambda1, double decades) {
  const double T = times.back();
  const double t_lo = T / std::pow(10.0, decades);
  TailFit fit;
  double acc = 0.0, fmax = 0.0, wmax = 0.0;
  int n = 0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    fmax = std::max(fmax, std::abs(f[j]));
    if (times[j] < t_lo) continue;
    wmax = std::max(wmax, std::abs(f[j]));
    if (f[j] <= 0.0) continue;
    acc += std::log(f[j]) + lambda1 * times[j];
    ++n;
  }
  if (wmax == 0.0 || wmax < 1e-14 * fmax) return {0.0, 0.0}; // tail is numerically zero
  if (n < 4) return {0.0, 1e9};                              // no usable tail
  fit.amplitude = std::exp(acc / n);
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (times[j] < t_lo || f[j] <= 0.0) continue;
    const double model = fit.amplitude * std::exp(-lambda1 * times[j]);
    fit.quality = std::max(fit.quality, std::abs(f[j] / model - 1.0));
  }
  return fit;
}

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& g, std::size_t stride) {
  double acc = 0.0;
  std::size_t prev = 0;
  for (std::size_t j = stride; j < t.size(); j += stride) {
    acc += 0.5 * (g[prev] + g[j]) * (t[j] - t[prev]);
    prev = j;
  }
  if (prev != t.size() - 1)
    acc += 0.5 * (g[prev] + g.back()) * (t.back() - t[prev]);
  return acc;
}

// Upper incomplete gamma Gamma(k, x) for integer k >= 1.
double upper_gamma_int(int k, double x) {
  double fact = 1.0, sum = 1.0, term = 1.0;
  for (int m = 1; m < k; ++m) {
    fact *= m;
    term *= x / m;
    sum += term;
  }
  return fact * std::exp(-x) * sum;
}

} // namespace

LaplaceResult laplace_transform(const std::vector<double>& times, const std::vector<double>& f,
                                double s, double lambda1) {
  if (times.size() != f.size() || times.size() < 8)
    throw std::invalid_argument("laplace_transform needs matching sample arrays");
  if (!(s > -lambda1 + 1e-12))
    throw std::invalid_argument("laplace_transform needs s > -lambda1");
  std::vector<double> g(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) g[j] = std::exp(-s * times[j]) * f[j];
  LaplaceResult r;
  const double fine = trapezoid(times, g, 1);
  const double coarse = trapezoid(times, g, 2);
  const TailFit tail = fit_tail_amplitude(times, f, lambda1);
  if (tail.quality > 0.5)
    throw std::runtime_error("insufficient exponential decay for the Laplace tail (quality " +
                             std::to_string(tail.quality) + ")");
  const double T = times.back();
  r.tail = tail.amplitude * std::exp(-(s + lambda1) * T) / (s + lambda1);
  r.value = fine + r.tail;
  r.quad_error = std::abs(fine - coarse) / 3.0 + tail.quality * std::abs(r.tail);
  return r;
}

LaplaceResult weighted_time_integral(const std::vector<double>& times,
                                     const std::vector<double>& f, int k, double lambda1) {
  if (k < 1) throw std::invalid_argument("moment order k must be >= 1");
  std::vector<double> g(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) g[j] = std::pow(times[j], k - 1) * f[j];
  LaplaceResult r;
  const double fine = trapezoid(times, g, 1);
  const double coarse = trapezoid(times, g, 2);
  const TailFit tail = fit_tail_amplitude(times, f, lambda1);
  if (tail.quality > 0.5)
    throw std::runtime_error("insufficient exponential decay for the tail completion");
  const double T = times.back();
  r.tail = tail.amplitude * upper_gamma_int(k, lambda1 * T) / std::pow(lambda1, k);
  r.value = fine + r.tail;
  r.quad_error = std::abs(fine - coarse) / 3.0 + tail.quality * std::abs(r.tail);
  return r;
}

AsymptoticFit fit_asymptotics(const HeatTimeline& tl, const FitOptions& opt) {
  AsymptoticFit fit;
  const double scale2 = tl.sys->scale2;
  fit.small_window[0] = opt.small_lo_rel * scale2;
  fit.small_window[1] = opt.small_hi_rel * scale2;

  auto small_fit = [&](double lo, double hi, double out[3]) {
    // Normal equations for H ~ a + b sqrt(t) + c t.
    double A[3][3] = {};
    double rhs[3] = {};
    int n = 0;
    for (std::size_t j = 1; j < tl.times.size(); ++j) {
      const double t = tl.times[j];
      if (t < lo || t > hi) continue;
      const double basis[3] = {1.0, std::sqrt(t), t};
      for (int a = 0; a < 3; ++a) {
        rhs[a] += basis[a] * tl.content[j];
        for (int b = 0; b < 3; ++b) A[a][b] += basis[a] * basis[b];
      }
      ++n;
    }
    if (n < 8) throw std::runtime_error("small-time fit window holds fewer than 8 samples");
    // Gaussian elimination (3x3).
    double M[3][4];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) M[i][j] = A[i][j];
      M[i][3] = rhs[i];
    }
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
      std::swap(M[piv], M[col]);
      for (int r = 0; r < 3; ++r) {
        if (r == col) continue;
        const double fctr = M[r][col] / M[col][col];
        for (int cc = col; cc < 4; ++cc) M[r][cc] -= fctr * M[col][cc];
      }
    }
    for (int i = 0; i < 3; ++i) out[i] = M[i][3] / M[i][i];
  };

  double abc[3];
  small_fit(fit.small_window[0], fit.small_window[1], abc);
  fit.area_hat = abc[0];
  fit.beta1_hat = abc[1];
  fit.beta2_hat = abc[2];

  double alt[3];
  small_fit(fit.small_window[0], fit.small_window[1] / 2.0, alt);
  fit.area_sensitivity = std::abs(alt[0] - abc[0]);
  fit.beta1_sensitivity = std::abs(alt[1] - abc[1]);
  small_fit(2.0 * fit.small_window[0], fit.small_window[1], alt);
  fit.area_sensitivity = std::max(fit.area_sensitivity, std::abs(alt[0] - abc[0]));
  fit.beta1_sensitivity = std::max(fit.beta1_sensitivity, std::abs(alt[1] - abc[1]));

  // Exponential tail: log H linear in t over the trailing decades.
  const double T = tl.times.back();
  const double t_lo = T / std::pow(10.0, opt.large_decades);
  fit.large_window[0] = t_lo;
  fit.large_window[1] = T;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t j = 1; j < tl.times.size(); ++j) {
    if (tl.times[j] < t_lo || tl.content[j] <= 0.0) continue;
    const double x = tl.times[j], y = std::log(tl.content[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 8) throw std::runtime_error("large-time fit window holds fewer than 8 samples");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.lambda1_hat = -slope;
  fit.c2_hat = std::exp((sy - slope * sx) / n);
  return fit;
}

} // namespace heatlab
