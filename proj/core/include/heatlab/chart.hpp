#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>

namespace heatlab {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<double, 4>; // row-major [a00 a01 a10 a11]

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

enum class ChartKind { euclidean, sphere, hyperbolic, custom };

/// Single-patch parametric chart of a constant-curvature surface (or a custom
/// warped metric).  Coordinates are (u,v); the sphere chart is
/// colatitude/longitude with v periodic, the hyperbolic chart is the Poincare
/// disk.
class AmbientChart {
 public:
  using MetricFn = std::function<Mat2(double, double)>;

  static AmbientChart euclidean();
  static AmbientChart sphere(double pole_margin = 0.05);
  static AmbientChart hyperbolic();
  static AmbientChart custom(MetricFn metric, double curvature,
                             Vec2 u_range, Vec2 v_range);

  ChartKind kind() const { return kind_; }
  double curvature() const { return curvature_; }

  /// Metric tensor g(u,v); throws if the point is outside the chart domain or
  /// the metric fails the SPD check there.
  Mat2 metric(double u, double v) const;

  double sqrt_det(double u, double v) const;
  Mat2 metric_inverse(double u, double v) const;

  /// |w|_g at the chart point.
  double norm(const Vec2& p, const Vec2& w) const;
  double inner(const Vec2& p, const Vec2& a, const Vec2& b) const;

  /// +90 degree rotation in the chart metric (maps the unit tangent of a loop
  /// traversed with the domain on its left to the inner unit normal).
  Vec2 rotate_ccw(const Vec2& p, const Vec2& w) const;

  /// Exact geodesic flow of the three constant-curvature models: starting
  /// point p, direction w (need not be unit), travel distance = dist * |w|_g.
  /// Not available for custom charts.
  Vec2 geodesic_offset(const Vec2& p, const Vec2& w, double dist) const;

  /// Chart rectangle (clipped by the pole margin for the sphere).
  Vec2 u_range() const { return u_range_; }
  Vec2 v_range() const { return v_range_; }

  /// Period of the v coordinate (2*pi for the sphere chart), if any.
  std::optional<double> v_period() const { return v_period_; }

  bool in_domain(double u, double v) const;

  /// Christoffel symbols Gamma^k_{ij} at (u,v), index [k][i][j].
  /// Analytic for the built-in charts; throws for custom metrics.
  std::array<std::array<std::array<double, 2>, 2>, 2> christoffel(double u, double v) const;

  /// d/du, d/dv of log(sqrt(det g)); used for divergence computations.
  Vec2 grad_log_sqrt_det(double u, double v) const;

  /// Default-constructed charts are euclidean.
  AmbientChart() = default;

 private:
  ChartKind kind_ = ChartKind::euclidean;
  double curvature_ = 0.0;
  double pole_margin_ = 0.05;
  Vec2 u_range_{-1e9, 1e9};
  Vec2 v_range_{-1e9, 1e9};
  std::optional<double> v_period_;
  MetricFn metric_fn_;
};

} // namespace heatlab
