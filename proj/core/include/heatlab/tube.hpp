#pragma once

#include <functional>
#include <string>

namespace heatlab {

/// 1D reduction of an isoparametric tube: the equidistant at distance r from
/// the soul has volume (soul volume factor) * J(r), so every functional
/// reduces to a weighted integral on (0, R].  For a hypersurface soul
/// (origin_order 0) the tube is two-sided and integrals carry a factor 2.
class TubeProfile {
 public:
  using Fn = std::function<double(double)>;

  TubeProfile(int soul_dim, int ambient_dim, double radius, Fn density, Fn drift);

  int soul_dim() const { return soul_dim_; }
  int ambient_dim() const { return ambient_dim_; }
  double radius() const { return radius_; }

  /// J(r) > 0 on (0, R], J ~ r^origin_order at the soul.
  double density(double r) const { return density_(r); }
  /// eta(r) = J'(r)/J(r).
  double drift(double r) const { return drift_(r); }

  /// n - 1 - soul_dim; the vanishing order of J at r = 0.
  int origin_order() const { return ambient_dim_ - 1 - soul_dim_; }
  /// Hypersurface soul: profile represents half of a two-sided tube.
  bool reflected() const { return origin_order() == 0; }

  /// Spot-checks the profile invariants: J positive, J(r)/r^m has a positive
  /// limit, and eta(r) - m/r stays bounded near the soul.  Throws on failure.
  void validate() const;

 private:
  int soul_dim_;
  int ambient_dim_;
  double radius_;
  Fn density_;
  Fn drift_;
};

} // namespace heatlab
