#include "heatlab/curve.hpp"

#include <cmath>
#include <stdexcept>

namespace heatlab {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

// Cyclic tridiagonal solve (Sherman-Morrison) for the periodic spline moments:
// uniform knot spacing h=1, system  m_{i-1} + 4 m_i + m_{i+1} = 6 (y_{i-1} - 2 y_i + y_{i+1}).
std::vector<double> periodic_spline_second_derivatives(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ym = y[(i + n - 1) % n], yp = y[(i + 1) % n];
    rhs[i] = 6.0 * (ym - 2.0 * y[i] + yp);
  }
  if (n < 3) return std::vector<double>(n, 0.0);

  // Sherman-Morrison split of the cyclic matrix {1,4,1} with unit corners:
  // A = T + u v^T, gamma = -4, u = (gamma,0,...,0,1), v = (1,0,...,0,1/gamma),
  // T tridiagonal with d_0 = 4 - gamma, d_{n-1} = 4 - 1/gamma.
  const double gamma = -4.0;
  auto tridiag = [&](std::vector<double> d) {
    std::vector<double> b(n, 4.0), x(n);
    b[0] = 4.0 - gamma;
    b[n - 1] = 4.0 - 1.0 / gamma;
    for (std::size_t i = 1; i < n; ++i) {
      const double w = 1.0 / b[i - 1];
      b[i] -= w;
      d[i] -= w * d[i - 1];
    }
    x[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - x[i + 1]) / b[i];
    return x;
  };

  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = 1.0;
  const std::vector<double> z1 = tridiag(std::move(rhs));
  const std::vector<double> z2 = tridiag(std::move(u));
  const double vz1 = z1[0] + z1[n - 1] / gamma;
  const double vz2 = z2[0] + z2[n - 1] / gamma;
  const double fac = vz1 / (1.0 + vz2);
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = z1[i] - fac * z2[i];
  return m;
}

ClosedCurve::ClosedCurve(std::vector<Vec2> samples, CurveKind kind, double v_shift_on_close)
    : pts_(std::move(samples)), kind_(kind), v_shift_(v_shift_on_close) {
  if (pts_.size() >= 2) {
    const Vec2& a = pts_.front();
    const Vec2& b = pts_.back();
    if (std::abs(a[0] - b[0]) < 1e-12 &&
        std::abs(a[1] + v_shift_ - b[1]) < 1e-12)
      pts_.pop_back();
  }
  if (pts_.size() < 3 && kind_ == CurveKind::periodic_spline)
    throw std::invalid_argument("closed spline curve needs at least 3 samples");
  if (kind_ == CurveKind::periodic_spline) build_spline();
}

void ClosedCurve::build_spline() {
  const std::size_t n = pts_.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = pts_[i][0];
    ys[i] = pts_[i][1];
  }
  if (v_shift_ != 0.0) {
    // Unwrap v for wrapping loops so the spline sees a monotone sequence.
    for (std::size_t i = 1; i < n; ++i) {
      while (ys[i] - ys[i - 1] > std::abs(v_shift_) / 2) ys[i] -= std::abs(v_shift_);
      while (ys[i] - ys[i - 1] < -std::abs(v_shift_) / 2) ys[i] += std::abs(v_shift_);
    }
  }
  const std::vector<double> mu = periodic_spline_second_derivatives(xs);
  // For wrapping loops the v spline interpolates v(theta) - slope*theta, which
  // is periodic; the linear part is added back on evaluation.
  std::vector<double> yper(n);
  const double slope = v_shift_ / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) yper[i] = ys[i] - slope * static_cast<double>(i);
  const std::vector<double> mv = periodic_spline_second_derivatives(yper);
  m2_.resize(n);
  for (std::size_t i = 0; i < n; ++i) m2_[i] = {mu[i], mv[i]};
  pts_v_lin_.resize(n);
  for (std::size_t i = 0; i < n; ++i) pts_v_lin_[i] = yper[i];
}

Vec2 ClosedCurve::position(double theta) const {
  const std::size_t n = pts_.size();
  double s = theta / kTwoPi * static_cast<double>(n);
  s -= std::floor(s / static_cast<double>(n)) * static_cast<double>(n);
  std::size_t i = static_cast<std::size_t>(s);
  if (i >= n) i = 0;
  const double t = s - static_cast<double>(i);
  const std::size_t j = (i + 1) % n;
  const double slope = v_shift_ / static_cast<double>(n);
  if (kind_ == CurveKind::polyline) {
    double v0 = pts_[i][1], v1 = pts_[j][1];
    if (v_shift_ != 0.0 && j == 0) v1 += v_shift_;
    return {pts_[i][0] + t * (pts_[j][0] - pts_[i][0]), v0 + t * (v1 - v0)};
  }
  // Cubic Hermite form from the spline moments (knot spacing 1).
  const double a = 1.0 - t, b = t;
  const double u = a * pts_[i][0] + b * pts_[j][0] +
                   ((a * a * a - a) * m2_[i][0] + (b * b * b - b) * m2_[j][0]) / 6.0;
  const double vper = a * pts_v_lin_[i] + b * pts_v_lin_[j] +
                      ((a * a * a - a) * m2_[i][1] + (b * b * b - b) * m2_[j][1]) / 6.0;
  return {u, vper + slope * s};
}

Vec2 ClosedCurve::derivative(double theta) const {
  const std::size_t n = pts_.size();
  const double scale = static_cast<double>(n) / kTwoPi; // d s / d theta
  double s = theta / kTwoPi * static_cast<double>(n);
  s -= std::floor(s / static_cast<double>(n)) * static_cast<double>(n);
  std::size_t i = static_cast<std::size_t>(s);
  if (i >= n) i = 0;
  const double t = s - static_cast<double>(i);
  const std::size_t j = (i + 1) % n;
  const double slope = v_shift_ / static_cast<double>(n);
  if (kind_ == CurveKind::polyline) {
    double v0 = pts_[i][1], v1 = pts_[j][1];
    if (v_shift_ != 0.0 && j == 0) v1 += v_shift_;
    return {(pts_[j][0] - pts_[i][0]) * scale, (v1 - v0) * scale};
  }
  const double a = 1.0 - t, b = t;
  const double du = (pts_[j][0] - pts_[i][0]) +
                    (-(3.0 * a * a - 1.0) * m2_[i][0] + (3.0 * b * b - 1.0) * m2_[j][0]) / 6.0;
  const double dv = (pts_v_lin_[j] - pts_v_lin_[i]) +
                    (-(3.0 * a * a - 1.0) * m2_[i][1] + (3.0 * b * b - 1.0) * m2_[j][1]) / 6.0;
  return {du * scale, (dv + slope) * scale};
}

} // namespace heatlab
