#include "heatlab/tube.hpp"

#include <cmath>
#include <stdexcept>

namespace heatlab {

TubeProfile::TubeProfile(int soul_dim, int ambient_dim, double radius, Fn density, Fn drift)
    : soul_dim_(soul_dim),
      ambient_dim_(ambient_dim),
      radius_(radius),
      density_(std::move(density)),
      drift_(std::move(drift)) {
  if (soul_dim < 0 || soul_dim > ambient_dim - 1)
    throw std::invalid_argument("soul_dim must lie in {0,...,n-1}");
  if (!(radius > 0.0)) throw std::invalid_argument("tube radius must be positive");
  validate();
}

void TubeProfile::validate() const {
  const int m = origin_order();
  // Positivity on a sample of (0, R].
  for (int i = 1; i <= 64; ++i) {
    const double r = radius_ * i / 64.0;
    if (!(density_(r) > 0.0))
      throw std::invalid_argument("tube density J must be positive on (0,R]");
  }
  // J(r)/r^m approaches a positive limit.
  const double r0 = radius_ * 1e-5, r1 = radius_ * 1e-6;
  const double a0 = density_(r0) / std::pow(r0, m);
  const double a1 = density_(r1) / std::pow(r1, m);
  if (!(a0 > 0.0) || !(a1 > 0.0) || std::abs(a0 / a1 - 1.0) > 1e-2)
    throw std::invalid_argument("tube density does not behave like r^origin_order at the soul");
  // eta(r) - m/r bounded near the origin.
  const double e0 = drift_(r0) - m / r0;
  const double e1 = drift_(r1) - m / r1;
  const double scale = std::max(1.0, std::abs(drift_(radius_)));
  if (std::abs(e0) > 1e3 * scale || std::abs(e1) > 1e3 * scale)
    throw std::invalid_argument("tube drift eta - m/r blows up near the soul");
}

} // namespace heatlab
