#include "heatlab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heatlab {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

double shoelace_area(const std::vector<Vec2>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& q = p[i];
    const Vec2& r = p[(i + 1) % p.size()];
    a += q[0] * r[1] - r[0] * q[1];
  }
  return 0.5 * a;
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

// Self-intersection at sample resolution (non-adjacent segment pairs).
bool loop_is_simple(const std::vector<Vec2>& p) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue; // adjacent through the wrap
      if (segments_intersect(a, b, p[j], p[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool loops_disjoint(const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j)
      if (segments_intersect(p[i], p[(i + 1) % p.size()], q[j], q[(j + 1) % q.size()]))
        return false;
  return true;
}

std::vector<Vec2> reversed(std::vector<Vec2> p) {
  std::reverse(p.begin() + 1, p.end()); // keep the first sample first
  return p;
}

} // namespace

DomainSpec DomainSpec::from_loops(AmbientChart chart, std::vector<ClosedCurve> loops) {
  if (loops.empty()) throw std::invalid_argument("domain needs at least one boundary loop");

  int wrapping = 0;
  for (const auto& l : loops)
    if (l.v_winding() != 0.0) ++wrapping;
  if (wrapping != 0 && wrapping != static_cast<int>(loops.size()))
    throw std::invalid_argument("mixed wrapping and non-wrapping boundary loops");

  for (std::size_t i = 0; i < loops.size(); ++i)
    if (!loop_is_simple(loops[i].samples()))
      throw std::invalid_argument("boundary loop " + std::to_string(i) +
                                  " self-intersects at sample resolution");
  for (std::size_t i = 0; i < loops.size(); ++i)
    for (std::size_t j = i + 1; j < loops.size(); ++j)
      if (loops[i].v_winding() == 0.0 && loops[j].v_winding() == 0.0 &&
          !loops_disjoint(loops[i].samples(), loops[j].samples()))
        throw std::invalid_argument("boundary loops " + std::to_string(i) + " and " +
                                    std::to_string(j) + " intersect");

  DomainSpec d;
  d.chart_ = std::move(chart);

  if (wrapping > 0) {
    if (loops.size() != 2)
      throw std::invalid_argument("a band domain needs exactly two wrapping loops");
    // Domain lies between the loops: the lower-u loop needs its inner normal
    // pointing toward +u, which on the sphere chart means traversal in -v.
    double mu0 = 0.0, mu1 = 0.0;
    for (const auto& p : loops[0].samples()) mu0 += p[0];
    for (const auto& p : loops[1].samples()) mu1 += p[0];
    mu0 /= static_cast<double>(loops[0].sample_count());
    mu1 /= static_cast<double>(loops[1].sample_count());
    if (mu0 > mu1) std::swap(loops[0], loops[1]);
    auto fix = [](ClosedCurve& c, bool want_negative_v) {
      const bool goes_positive = c.v_winding() > 0.0;
      if (goes_positive == want_negative_v)
        c = ClosedCurve(reversed(c.samples()), c.kind(), -c.v_winding());
    };
    fix(loops[0], true);   // lower boundary: -v traversal => inner normal +u
    fix(loops[1], false);  // upper boundary: +v traversal => inner normal -u
    d.loops_ = std::move(loops);
    return d;
  }

  // Orient: largest-|area| loop counterclockwise, the others clockwise.
  std::size_t outer = 0;
  double amax = -1.0;
  std::vector<double> area(loops.size());
  for (std::size_t i = 0; i < loops.size(); ++i) {
    area[i] = shoelace_area(loops[i].samples());
    if (std::abs(area[i]) > amax) {
      amax = std::abs(area[i]);
      outer = i;
    }
  }
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const bool want_ccw = (i == outer);
    if ((area[i] > 0.0) != want_ccw)
      loops[i] = ClosedCurve(reversed(loops[i].samples()), loops[i].kind());
  }
  d.loops_ = std::move(loops);
  return d;
}

bool DomainSpec::is_band() const {
  return !loops_.empty() && loops_.front().v_winding() != 0.0;
}

DomainSpec DomainSpec::disk(double radius, Vec2 center, int samples) {
  std::vector<Vec2> p(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = kTwoPi * i / samples;
    p[i] = {center[0] + radius * std::cos(t), center[1] + radius * std::sin(t)};
  }
  return from_loops(AmbientChart::euclidean(), {ClosedCurve(p, CurveKind::periodic_spline)});
}

DomainSpec DomainSpec::ellipse(double a, double b, Vec2 center, int samples) {
  std::vector<Vec2> p(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = kTwoPi * i / samples;
    p[i] = {center[0] + a * std::cos(t), center[1] + b * std::sin(t)};
  }
  return from_loops(AmbientChart::euclidean(), {ClosedCurve(p, CurveKind::periodic_spline)});
}

DomainSpec DomainSpec::annulus(double r_inner, double r_outer, int samples) {
  if (!(0.0 < r_inner && r_inner < r_outer))
    throw std::invalid_argument("annulus needs 0 < r_inner < r_outer");
  auto circle = [&](double r) {
    std::vector<Vec2> p(samples);
    for (int i = 0; i < samples; ++i) {
      const double t = kTwoPi * i / samples;
      p[i] = {r * std::cos(t), r * std::sin(t)};
    }
    return ClosedCurve(p, CurveKind::periodic_spline);
  };
  return from_loops(AmbientChart::euclidean(), {circle(r_outer), circle(r_inner)});
}

DomainSpec DomainSpec::rectangle(Vec2 lo, Vec2 hi, int samples_per_side) {
  std::vector<Vec2> p;
  p.reserve(4 * samples_per_side);
  auto edge = [&](Vec2 a, Vec2 b) {
    for (int i = 0; i < samples_per_side; ++i) {
      const double t = static_cast<double>(i) / samples_per_side;
      p.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
    }
  };
  edge({lo[0], lo[1]}, {hi[0], lo[1]});
  edge({hi[0], lo[1]}, {hi[0], hi[1]});
  edge({hi[0], hi[1]}, {lo[0], hi[1]});
  edge({lo[0], hi[1]}, {lo[0], lo[1]});
  return from_loops(AmbientChart::euclidean(), {ClosedCurve(p, CurveKind::polyline)});
}

DomainSpec DomainSpec::geodesic_cap(const AmbientChart& chart, Vec2 center, double rho,
                                    int samples) {
  std::vector<Vec2> p(samples);
  if (chart.kind() == ChartKind::sphere) {
    // Circle of geodesic radius rho about the embedded center.
    const double cu = std::cos(center[0]), su = std::sin(center[0]);
    const double cv = std::cos(center[1]), sv = std::sin(center[1]);
    const std::array<double, 3> C{su * cv, su * sv, cu};
    // Orthonormal frame at C.
    const std::array<double, 3> e1{cu * cv, cu * sv, -su};         // d/du
    const std::array<double, 3> e2{-sv, cv, 0.0};                  // d/dv / sin(u)
    for (int i = 0; i < samples; ++i) {
      const double t = kTwoPi * i / samples;
      std::array<double, 3> q;
      for (int k = 0; k < 3; ++k)
        q[k] = std::cos(rho) * C[k] + std::sin(rho) * (std::cos(t) * e1[k] + std::sin(t) * e2[k]);
      const double uu = std::acos(std::clamp(q[2], -1.0, 1.0));
      double vv = std::atan2(q[1], q[0]);
      if (vv < 0.0) vv += kTwoPi;
      p[i] = {uu, vv};
    }
    return from_loops(chart, {ClosedCurve(p, CurveKind::periodic_spline)});
  }
  if (chart.kind() == ChartKind::hyperbolic) {
    if (center[0] != 0.0 || center[1] != 0.0)
      throw std::invalid_argument("hyperbolic geodesic caps are supported about the origin only");
    const double re = std::tanh(rho / 2.0); // Euclidean radius of the geodesic circle
    for (int i = 0; i < samples; ++i) {
      const double t = kTwoPi * i / samples;
      p[i] = {re * std::cos(t), re * std::sin(t)};
    }
    return from_loops(chart, {ClosedCurve(p, CurveKind::periodic_spline)});
  }
  if (chart.kind() == ChartKind::euclidean) return disk(rho, center, samples);
  throw std::invalid_argument("geodesic_cap: unsupported chart");
}

DomainSpec DomainSpec::spherical_band(double u0, double u1, int samples) {
  if (!(u0 < u1)) throw std::invalid_argument("spherical_band needs u0 < u1");
  auto latitude = [&](double u) {
    std::vector<Vec2> p(samples);
    for (int i = 0; i < samples; ++i) p[i] = {u, kTwoPi * i / samples};
    return ClosedCurve(p, CurveKind::periodic_spline, kTwoPi);
  };
  return from_loops(AmbientChart::sphere(), {latitude(u0), latitude(u1)});
}

double BoundaryGeometry::integrate(
    const std::function<double(const BoundarySample&)>& f) const {
  double acc = 0.0;
  for (const auto& s : samples) acc += f(s) * s.dsigma;
  return acc;
}

BoundaryGeometry boundary_geometry(const DomainSpec& d, int resolution) {
  if (resolution < 16) throw std::invalid_argument("boundary resolution must be >= 16 per loop");
  BoundaryGeometry bg;
  const auto& chart = d.chart();
  for (std::size_t li = 0; li < d.loops().size(); ++li) {
    const ClosedCurve& c = d.loops()[li];
    const double dtheta = kTwoPi / resolution;
    double arc = 0.0;
    for (int i = 0; i < resolution; ++i) {
      const double theta = dtheta * i;
      BoundarySample s;
      s.loop = static_cast<int>(li);
      s.theta = theta;
      s.point = c.position(theta);
      const Vec2 dp = c.derivative(theta);
      const double speed = chart.norm(s.point, dp);
      if (!(speed > 0.0))
        throw std::runtime_error("degenerate boundary parameterization on loop " +
                                 std::to_string(li));
      s.tangent = {dp[0] / speed, dp[1] / speed};
      s.normal = chart.rotate_ccw(s.point, s.tangent);
      s.dsigma = speed * dtheta; // periodic trapezoid weight
      s.arclength = arc;
      arc += s.dsigma;
      bg.samples.push_back(s);
    }
    bg.loop_length.push_back(arc);
    bg.total_length += arc;
  }
  if (!(bg.total_length > 0.0)) throw std::runtime_error("zero-length boundary");
  return bg;
}

DeformationField DeformationField::constant(double value) {
  return DeformationField([value](int, double) { return value; }, false);
}

DeformationField DeformationField::harmonic(int mode, bool use_sin, double amplitude) {
  return DeformationField(
      [mode, use_sin, amplitude](int, double theta) {
        return amplitude * (use_sin ? std::sin(mode * theta) : std::cos(mode * theta));
      },
      false);
}

double mean_normal_speed(const DeformationField& v, const DomainSpec& d, int resolution) {
  const BoundaryGeometry bg = boundary_geometry(d, resolution);
  const double num = bg.integrate([&](const BoundarySample& s) { return v.speed(s.loop, s.theta); });
  return num / bg.total_length;
}

DeformationField project_volume_preserving(const DeformationField& v, const DomainSpec& d,
                                           int resolution) {
  const double mean = mean_normal_speed(v, d, resolution);
  if (mean == 0.0)
    return DeformationField([v](int l, double t) { return v.speed(l, t); }, true);
  return DeformationField([v, mean](int l, double t) { return v.speed(l, t) - mean; }, true);
}

DomainSpec perturb_domain(const DomainSpec& d, const DeformationField& v, double eps) {
  if (eps == 0.0) return d;
  const auto& chart = d.chart();
  std::vector<ClosedCurve> moved;
  moved.reserve(d.loops().size());
  for (std::size_t li = 0; li < d.loops().size(); ++li) {
    const ClosedCurve& c = d.loops()[li];
    const std::size_t n = c.sample_count();
    std::vector<Vec2> q(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
      const Vec2 p = c.samples()[i];
      const Vec2 dp = c.derivative(theta);
      const double speed = chart.norm(p, dp);
      const Vec2 tangent{dp[0] / speed, dp[1] / speed};
      const Vec2 normal = chart.rotate_ccw(p, tangent);
      q[i] = chart.geodesic_offset(p, normal, eps * v.speed(static_cast<int>(li), theta));
    }
    moved.emplace_back(q, c.kind(), c.v_winding());
  }
  try {
    return DomainSpec::from_loops(chart, std::move(moved));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("perturbation eps=" + std::to_string(eps) +
                                " breaks the domain: " + e.what());
  }
}

} // namespace heatlab
