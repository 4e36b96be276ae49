#pragma once

#include <cstdint>
#include <vector>

#include "heatlab/domain.hpp"

namespace heatlab {

struct McOptions {
  std::uint64_t seed = 20240901ull;
  double t_cap = 0.0;      // 0 = auto (1.5 * squared bbox diameter)
  int threads = 0;         // 0 = hardware concurrency (result is thread-count independent)
  bool bridge_correction = true; // Brownian-bridge crossing test between samples
  double max_capped_fraction = 1e-3;
};

struct McResult {
  Vec2 start{};
  double mean = 0.0;
  double std_error = 0.0;
  long paths = 0;
  long capped = 0;
  std::uint64_t seed = 0;
};

/// Euler-Maruyama first-exit sampler on flat charts.  Per-coordinate
/// increments have variance 2*step, matching the convention in which the mean
/// exit time solves (positive Laplacian) E_1 = 1.  Exit times use linear
/// interpolation of the boundary crossing; between samples an optional
/// Brownian-bridge test removes the half-order discretization bias.
/// Paths run on independent per-path generator streams, so results do not
/// depend on the thread count.  Throws if more than max_capped_fraction of
/// the paths hit the time cap.
std::vector<McResult> mc_mean_exit(const DomainSpec& d, const std::vector<Vec2>& starts,
                                   long paths, double step, const McOptions& opt = {});

} // namespace heatlab
