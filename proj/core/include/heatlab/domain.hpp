#pragma once

#include <functional>
#include <string>
#include <vector>

#include "heatlab/chart.hpp"
#include "heatlab/curve.hpp"

namespace heatlab {

/// Bounded domain on a chart, described by oriented closed boundary loops.
/// Loops are oriented so the domain lies on their left; the inner unit normal
/// is then the metric +90-degree rotation of the unit tangent.
class DomainSpec {
 public:
  /// Validates closure and simplicity, and fixes loop orientations (largest
  /// loop counterclockwise, holes clockwise).  Throws std::invalid_argument
  /// with the loop index on a self-intersecting or non-closed loop.
  static DomainSpec from_loops(AmbientChart chart, std::vector<ClosedCurve> loops);

  const AmbientChart& chart() const { return chart_; }
  const std::vector<ClosedCurve>& loops() const { return loops_; }
  std::size_t loop_count() const { return loops_.size(); }

  /// True if every loop winds around the chart's periodic v direction
  /// (latitude band on the sphere).
  bool is_band() const;

  // --- Canonical constructions -------------------------------------------

  static DomainSpec disk(double radius, Vec2 center = {0.0, 0.0}, int samples = 512);
  static DomainSpec ellipse(double a, double b, Vec2 center = {0.0, 0.0}, int samples = 512);
  static DomainSpec annulus(double r_inner, double r_outer, int samples = 512);
  static DomainSpec rectangle(Vec2 lo, Vec2 hi, int samples_per_side = 128);
  /// Geodesic circle of radius rho about a chart point (sphere or hyperbolic
  /// charts; hyperbolic center must be the origin).
  static DomainSpec geodesic_cap(const AmbientChart& chart, Vec2 center, double rho,
                                 int samples = 512);
  /// Latitude band u0 < u < u1 on the sphere chart (two wrapping loops).
  static DomainSpec spherical_band(double u0, double u1, int samples = 512);

 private:
  AmbientChart chart_;
  std::vector<ClosedCurve> loops_;
};

/// One resampled boundary point with its differential-geometric data.
struct BoundarySample {
  int loop = 0;
  double theta = 0.0;      // curve parameter in [0, 2*pi)
  double arclength = 0.0;  // cumulative metric arclength along the loop
  Vec2 point{};
  Vec2 tangent{};  // unit in the chart metric
  Vec2 normal{};   // inner unit normal
  double dsigma = 0.0;  // boundary quadrature weight
};

struct BoundaryGeometry {
  std::vector<BoundarySample> samples;  // loop-major, theta-increasing
  std::vector<double> loop_length;
  double total_length = 0.0;

  double integrate(const std::function<double(const BoundarySample&)>& f) const;
};

/// Samples each loop at `resolution` points: positions, unit tangents, inner
/// normals and dsigma weights (periodic trapezoid quadrature).
BoundaryGeometry boundary_geometry(const DomainSpec& d, int resolution = 256);

/// Normal-speed field on the boundary, one scalar per boundary point.
class DeformationField {
 public:
  using SpeedFn = std::function<double(int loop, double theta)>;

  DeformationField() = default;
  explicit DeformationField(SpeedFn speed, bool volume_projected = false)
      : speed_(std::move(speed)), volume_projected_(volume_projected) {}

  static DeformationField constant(double value);
  /// cos(m*theta) or sin(m*theta) on every loop.
  static DeformationField harmonic(int mode, bool use_sin = false, double amplitude = 1.0);

  double speed(int loop, double theta) const { return speed_ ? speed_(loop, theta) : 0.0; }
  bool volume_projected() const { return volume_projected_; }

 private:
  SpeedFn speed_;
  bool volume_projected_ = false;
};

/// Subtracts the dsigma-weighted mean so the first variation of volume
/// vanishes; returns the input unchanged if the mean is already zero.
DeformationField project_volume_preserving(const DeformationField& v, const DomainSpec& d,
                                           int resolution = 1024);

/// dsigma-weighted mean normal speed over the whole boundary.
double mean_normal_speed(const DeformationField& v, const DomainSpec& d, int resolution = 1024);

/// Moves every stored boundary sample a metric distance eps*speed along the
/// inner normal geodesic and rebuilds the loops.  eps = 0 returns the input
/// bit-for-bit.  Throws if a perturbed loop self-intersects.
DomainSpec perturb_domain(const DomainSpec& d, const DeformationField& v, double eps);

} // namespace heatlab
