#include "heatlab/chart.hpp"

#include <cmath>
#include <string>

namespace heatlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat2 mat_identity() { return {1.0, 0.0, 0.0, 1.0}; }

// Embedding of the colatitude/longitude chart into R^3.
std::array<double, 3> sphere_embed(double u, double v) {
  return {std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u)};
}

// Push-forward of a chart vector under the embedding.
std::array<double, 3> sphere_push(double u, double v, const Vec2& w) {
  const double su = std::sin(u), cu = std::cos(u);
  const double sv = std::sin(v), cv = std::cos(v);
  return {w[0] * cu * cv - w[1] * su * sv,
          w[0] * cu * sv + w[1] * su * cv,
          -w[0] * su};
}

// Minkowski model of the hyperbolic plane: X0^2 - X1^2 - X2^2 = 1, X0 > 0.
std::array<double, 3> hyp_embed(double u, double v) {
  const double r2 = u * u + v * v;
  const double s = 1.0 / (1.0 - r2);
  return {(1.0 + r2) * s, 2.0 * u * s, 2.0 * v * s};
}

std::array<double, 3> hyp_push(double u, double v, const Vec2& w) {
  const double r2 = u * u + v * v;
  const double s = 1.0 / (1.0 - r2);
  const double ds = 2.0 * (u * w[0] + v * w[1]) * s * s; // d/de of 1/(1-r2)
  return {2.0 * (u * w[0] + v * w[1]) * s + (1.0 + r2) * ds,
          2.0 * w[0] * s + 2.0 * u * ds,
          2.0 * w[1] * s + 2.0 * v * ds};
}

} // namespace

AmbientChart AmbientChart::euclidean() {
  AmbientChart c;
  c.kind_ = ChartKind::euclidean;
  c.curvature_ = 0.0;
  return c;
}

AmbientChart AmbientChart::sphere(double pole_margin) {
  AmbientChart c;
  c.kind_ = ChartKind::sphere;
  c.curvature_ = 1.0;
  c.pole_margin_ = pole_margin;
  c.u_range_ = {pole_margin, kPi - pole_margin};
  c.v_range_ = {0.0, 2.0 * kPi};
  c.v_period_ = 2.0 * kPi;
  return c;
}

AmbientChart AmbientChart::hyperbolic() {
  AmbientChart c;
  c.kind_ = ChartKind::hyperbolic;
  c.curvature_ = -1.0;
  c.u_range_ = {-1.0, 1.0};
  c.v_range_ = {-1.0, 1.0};
  return c;
}

AmbientChart AmbientChart::custom(MetricFn metric, double curvature,
                                  Vec2 u_range, Vec2 v_range) {
  AmbientChart c;
  c.kind_ = ChartKind::custom;
  c.curvature_ = curvature;
  c.metric_fn_ = std::move(metric);
  c.u_range_ = u_range;
  c.v_range_ = v_range;
  return c;
}

bool AmbientChart::in_domain(double u, double v) const {
  switch (kind_) {
    case ChartKind::euclidean:
      return true;
    case ChartKind::sphere:
      return u >= u_range_[0] && u <= u_range_[1];
    case ChartKind::hyperbolic:
      return u * u + v * v < 1.0;
    case ChartKind::custom:
      return u >= u_range_[0] && u <= u_range_[1] && v >= v_range_[0] && v <= v_range_[1];
  }
  return false;
}

Mat2 AmbientChart::metric(double u, double v) const {
  if (!in_domain(u, v))
    throw std::domain_error("chart point (" + std::to_string(u) + "," + std::to_string(v) +
                            ") outside the chart domain");
  Mat2 g;
  switch (kind_) {
    case ChartKind::euclidean:
      g = mat_identity();
      break;
    case ChartKind::sphere: {
      const double s = std::sin(u);
      g = {1.0, 0.0, 0.0, s * s};
      break;
    }
    case ChartKind::hyperbolic: {
      const double f = 2.0 / (1.0 - u * u - v * v);
      g = {f * f, 0.0, 0.0, f * f};
      break;
    }
    case ChartKind::custom:
      g = metric_fn_(u, v);
      break;
  }
  // SPD check: both eigenvalues positive <=> trace > 0 and det > 0.
  const double det = g[0] * g[3] - g[1] * g[2];
  if (!(det > 0.0) || !(g[0] + g[3] > 0.0))
    throw std::domain_error("degenerate metric at (" + std::to_string(u) + "," +
                            std::to_string(v) + ")");
  return g;
}

double AmbientChart::sqrt_det(double u, double v) const {
  const Mat2 g = metric(u, v);
  return std::sqrt(g[0] * g[3] - g[1] * g[2]);
}

Mat2 AmbientChart::metric_inverse(double u, double v) const {
  const Mat2 g = metric(u, v);
  const double det = g[0] * g[3] - g[1] * g[2];
  return {g[3] / det, -g[1] / det, -g[2] / det, g[0] / det};
}

double AmbientChart::inner(const Vec2& p, const Vec2& a, const Vec2& b) const {
  const Mat2 g = metric(p[0], p[1]);
  return a[0] * g[0] * b[0] + a[0] * g[1] * b[1] + a[1] * g[2] * b[0] + a[1] * g[3] * b[1];
}

double AmbientChart::norm(const Vec2& p, const Vec2& w) const {
  return std::sqrt(std::max(0.0, inner(p, w, w)));
}

Vec2 AmbientChart::rotate_ccw(const Vec2& p, const Vec2& w) const {
  const Mat2 g = metric(p[0], p[1]);
  const double sq = std::sqrt(g[0] * g[3] - g[1] * g[2]);
  // J w = (1/sqrt(det g)) (-g01 w0 - g11 w1, g00 w0 + g01 w1): metric rotation
  // by +90 degrees, orientation of the (u,v) coordinates.
  return {(-g[1] * w[0] - g[3] * w[1]) / sq, (g[0] * w[0] + g[1] * w[1]) / sq};
}

Vec2 AmbientChart::geodesic_offset(const Vec2& p, const Vec2& w, double dist) const {
  if (dist == 0.0) return p;
  const double wn = norm(p, w);
  if (wn == 0.0) return p;
  const double d = dist * wn;
  switch (kind_) {
    case ChartKind::euclidean:
      return {p[0] + dist * w[0], p[1] + dist * w[1]};
    case ChartKind::sphere: {
      const auto P = sphere_embed(p[0], p[1]);
      auto W = sphere_push(p[0], p[1], w);
      for (auto& x : W) x /= wn;
      const double c = std::cos(d), s = std::sin(d);
      const std::array<double, 3> Q{P[0] * c + W[0] * s, P[1] * c + W[1] * s,
                                    P[2] * c + W[2] * s};
      double nu = std::acos(std::clamp(Q[2], -1.0, 1.0));
      double nv = std::atan2(Q[1], Q[0]);
      if (nv < 0.0) nv += 2.0 * kPi;
      return {nu, nv};
    }
    case ChartKind::hyperbolic: {
      const auto X = hyp_embed(p[0], p[1]);
      auto W = hyp_push(p[0], p[1], w);
      for (auto& x : W) x /= wn;
      const double c = std::cosh(d), s = std::sinh(d);
      const std::array<double, 3> Y{X[0] * c + W[0] * s, X[1] * c + W[1] * s,
                                    X[2] * c + W[2] * s};
      return {Y[1] / (1.0 + Y[0]), Y[2] / (1.0 + Y[0])};
    }
    case ChartKind::custom:
      throw std::logic_error("geodesic_offset is not available for custom charts");
  }
  return p;
}

std::array<std::array<std::array<double, 2>, 2>, 2>
AmbientChart::christoffel(double u, double v) const {
  std::array<std::array<std::array<double, 2>, 2>, 2> G{};
  switch (kind_) {
    case ChartKind::euclidean:
      break;
    case ChartKind::sphere: {
      const double su = std::sin(u), cu = std::cos(u);
      G[0][1][1] = -su * cu;                       // Gamma^u_vv
      G[1][0][1] = G[1][1][0] = cu / su;           // Gamma^v_uv
      break;
    }
    case ChartKind::hyperbolic: {
      // Conformal metric e^{2f} I with f = log(2/(1-r^2)):
      // Gamma^u_uu = f_u, Gamma^u_uv = f_v, Gamma^u_vv = -f_u, etc.
      const double r2 = u * u + v * v;
      const double fu = 2.0 * u / (1.0 - r2);
      const double fv = 2.0 * v / (1.0 - r2);
      G[0][0][0] = fu;  G[0][0][1] = G[0][1][0] = fv;  G[0][1][1] = -fu;
      G[1][1][1] = fv;  G[1][0][1] = G[1][1][0] = fu;  G[1][0][0] = -fv;
      break;
    }
    case ChartKind::custom:
      throw std::logic_error("christoffel symbols are not available for custom charts");
  }
  return G;
}

Vec2 AmbientChart::grad_log_sqrt_det(double u, double v) const {
  switch (kind_) {
    case ChartKind::euclidean:
      return {0.0, 0.0};
    case ChartKind::sphere:
      return {std::cos(u) / std::sin(u), 0.0};
    case ChartKind::hyperbolic: {
      const double r2 = u * u + v * v;
      return {4.0 * u / (1.0 - r2), 4.0 * v / (1.0 - r2)};
    }
    case ChartKind::custom:
      throw std::logic_error("grad_log_sqrt_det is not available for custom charts");
  }
  return {0.0, 0.0};
}

} // namespace heatlab
