#include "heatlab/montecarlo.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "heatlab/polyline.hpp"

namespace heatlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct PathOutcome {
  double exit_time;
  bool capped;
};

PathOutcome run_path(const PolylineShape& shape, Vec2 start, double step, double t_cap,
                     bool bridge, std::uint64_t path_seed) {
  std::mt19937_64 rng(path_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = std::sqrt(2.0 * step);
  const double bridge_range2 = 25.0 * step; // exp(-25) below double noise

  Vec2 p = start;
  if (!shape.inside(p)) return {0.0, false};
  double d_prev = -1.0; // lazy exact distance at the previous point
  long n = 0;
  const long max_steps = static_cast<long>(t_cap / step) + 1;
  while (n < max_steps) {
    const Vec2 q{p[0] + sigma * normal(rng), p[1] + sigma * normal(rng)};
    ++n;
    if (!shape.inside(q)) {
      const double din = d_prev >= 0.0 ? d_prev : shape.distance(p);
      const double dout = shape.distance(q);
      const double frac = din + dout > 0.0 ? din / (din + dout) : 0.5;
      return {(static_cast<double>(n) - 1.0 + frac) * step, false};
    }
    if (bridge) {
      const double lb0 = d_prev >= 0.0 ? d_prev : shape.distance_lower_bound(p);
      const double lb1 = shape.distance_lower_bound(q);
      if (lb0 * lb1 < bridge_range2) {
        const double d0 = d_prev >= 0.0 ? d_prev : shape.distance(p);
        const double d1 = shape.distance(q);
        const double cross_prob = std::exp(-d0 * d1 / step);
        if (std::generate_canonical<double, 53>(rng) < cross_prob) {
          const double frac = d0 + d1 > 0.0 ? d0 / (d0 + d1) : 0.5;
          return {(static_cast<double>(n) - 1.0 + frac) * step, false};
        }
        d_prev = d1;
      } else {
        d_prev = -1.0;
      }
    }
    p = q;
  }
  return {t_cap, true};
}

} // namespace

std::vector<McResult> mc_mean_exit(const DomainSpec& d, const std::vector<Vec2>& starts,
                                   long paths, double step, const McOptions& opt) {
  if (d.chart().kind() != ChartKind::euclidean)
    throw std::invalid_argument("mc_mean_exit supports flat charts only");
  if (paths < 1 || !(step > 0.0)) throw std::invalid_argument("bad path count or step");

  const PolylineShape shape(d, 4096);
  double t_cap = opt.t_cap;
  if (t_cap <= 0.0) {
    const double dx = shape.bbox_hi()[0] - shape.bbox_lo()[0];
    const double dy = shape.bbox_hi()[1] - shape.bbox_lo()[1];
    t_cap = 1.5 * (dx * dx + dy * dy);
  }

  int threads = opt.threads > 0 ? opt.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, 16));

  std::vector<McResult> results;
  for (std::size_t si = 0; si < starts.size(); ++si) {
    std::vector<double> times(static_cast<std::size_t>(paths));
    std::vector<char> capped(static_cast<std::size_t>(paths), 0);
    const std::uint64_t start_salt = splitmix64(opt.seed + 0x51ull * si);

    auto worker = [&](long lo, long hi) {
      for (long pth = lo; pth < hi; ++pth) {
        const std::uint64_t path_seed = splitmix64(start_salt ^ static_cast<std::uint64_t>(pth));
        const PathOutcome o =
            run_path(shape, starts[si], step, t_cap, opt.bridge_correction, path_seed);
        times[static_cast<std::size_t>(pth)] = o.exit_time;
        capped[static_cast<std::size_t>(pth)] = o.capped ? 1 : 0;
      }
    };
    if (threads == 1) {
      worker(0, paths);
    } else {
      std::vector<std::thread> pool;
      const long chunk = (paths + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        const long lo = t * chunk, hi = std::min<long>(paths, lo + chunk);
        if (lo < hi) pool.emplace_back(worker, lo, hi);
      }
      for (auto& th : pool) th.join();
    }

    // Sequential reduction in path order keeps outputs bit-stable.
    McResult r;
    r.start = starts[si];
    r.paths = paths;
    r.seed = opt.seed;
    double sum = 0.0;
    long ncap = 0;
    for (long pth = 0; pth < paths; ++pth) {
      sum += times[static_cast<std::size_t>(pth)];
      ncap += capped[static_cast<std::size_t>(pth)];
    }
    r.capped = ncap;
    if (static_cast<double>(ncap) > opt.max_capped_fraction * static_cast<double>(paths))
      throw std::runtime_error("mc_mean_exit: " + std::to_string(ncap) +
                               " paths hit the time cap");
    r.mean = sum / static_cast<double>(paths);
    double var = 0.0;
    for (long pth = 0; pth < paths; ++pth) {
      const double dlt = times[static_cast<std::size_t>(pth)] - r.mean;
      var += dlt * dlt;
    }
    var /= static_cast<double>(paths - 1);
    r.std_error = std::sqrt(var / static_cast<double>(paths));
    results.push_back(r);
  }
  return results;
}

} // namespace heatlab
