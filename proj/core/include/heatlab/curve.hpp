#pragma once

#include <vector>

#include "heatlab/chart.hpp"

namespace heatlab {

/// Closed boundary curve stored as a dense sample array.  The curve parameter
/// is theta in [0, 2*pi), proportional to the sample index; splined loops are
/// C^2 (periodic cubic interpolation), polyline loops are piecewise linear
/// (for domains with corners, e.g. squares).
enum class CurveKind { periodic_spline, polyline };

class ClosedCurve {
 public:
  ClosedCurve() = default;
  /// samples: one point per sample, the closing edge back to samples[0] is
  /// implicit.  If the last point repeats the first (within 1e-12, modulo the
  /// chart v-period for wrapping loops) the duplicate is dropped.
  ClosedCurve(std::vector<Vec2> samples, CurveKind kind, double v_shift_on_close = 0.0);

  std::size_t sample_count() const { return pts_.size(); }
  const std::vector<Vec2>& samples() const { return pts_; }
  CurveKind kind() const { return kind_; }

  /// Total v-increment over one loop (e.g. 2*pi for a latitude circle on the
  /// sphere chart); 0 for ordinary loops.
  double v_winding() const { return v_shift_; }

  Vec2 position(double theta) const;
  Vec2 derivative(double theta) const; // d position / d theta

 private:
  void build_spline();

  std::vector<Vec2> pts_;
  CurveKind kind_ = CurveKind::periodic_spline;
  double v_shift_ = 0.0;
  // Periodic cubic spline second derivatives per coordinate (empty for polylines).
  std::vector<Vec2> m2_;
  // v samples with the winding's linear part removed (spline knot values).
  std::vector<double> pts_v_lin_;
};

/// Solves the cyclic tridiagonal system of the periodic natural cubic spline.
std::vector<double> periodic_spline_second_derivatives(const std::vector<double>& y);

} // namespace heatlab
