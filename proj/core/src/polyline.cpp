#include "heatlab/polyline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace heatlab {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

PolylineShape::PolylineShape(const DomainSpec& d, int samples_per_loop, int grid_resolution) {
  if (d.is_band())
    throw std::invalid_argument("PolylineShape does not support wrapping band loops");

  lo_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  hi_ = {-lo_[0], -lo_[1]};
  for (std::size_t li = 0; li < d.loops().size(); ++li) {
    const ClosedCurve& c = d.loops()[li];
    Vec2 prev = c.position(0.0);
    for (int i = 1; i <= samples_per_loop; ++i) {
      const Vec2 q = c.position(kTwoPi * i / samples_per_loop);
      segs_.push_back({prev, q, static_cast<int>(li)});
      prev = q;
    }
  }
  for (const auto& s : segs_) {
    lo_[0] = std::min({lo_[0], s.a[0], s.b[0]});
    lo_[1] = std::min({lo_[1], s.a[1], s.b[1]});
    hi_[0] = std::max({hi_[0], s.a[0], s.b[0]});
    hi_[1] = std::max({hi_[1], s.a[1], s.b[1]});
  }
  const double w = std::max(hi_[0] - lo_[0], hi_[1] - lo_[1]);
  cell_ = w / grid_resolution;
  // Pad by three cells so the border of the grid is strictly outside.
  lo_[0] -= 3 * cell_;
  lo_[1] -= 3 * cell_;
  hi_[0] += 3 * cell_;
  hi_[1] += 3 * cell_;
  gx_ = static_cast<int>(std::ceil((hi_[0] - lo_[0]) / cell_)) + 1;
  gy_ = static_cast<int>(std::ceil((hi_[1] - lo_[1]) / cell_)) + 1;

  cell_segs_.assign(static_cast<std::size_t>(gx_) * gy_, {});
  for (std::size_t si = 0; si < segs_.size(); ++si) {
    const auto& s = segs_[si];
    const int x0 = static_cast<int>((std::min(s.a[0], s.b[0]) - lo_[0]) / cell_);
    const int x1 = static_cast<int>((std::max(s.a[0], s.b[0]) - lo_[0]) / cell_);
    const int y0 = static_cast<int>((std::min(s.a[1], s.b[1]) - lo_[1]) / cell_);
    const int y1 = static_cast<int>((std::max(s.a[1], s.b[1]) - lo_[1]) / cell_);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        cell_segs_[static_cast<std::size_t>(y) * gx_ + x].push_back(static_cast<int>(si));
  }

  // Classification grid: boundary cells from the segment index, BFS levels
  // away from them, and inside/outside flags from one exact test per
  // connected component.
  const std::size_t nc = cell_segs_.size();
  cell_state_.assign(nc, 2); // 2 = unclassified
  cell_level_.assign(nc, std::numeric_limits<std::uint16_t>::max());
  std::deque<int> bfs;
  for (std::size_t i = 0; i < nc; ++i)
    if (!cell_segs_[i].empty()) {
      cell_state_[i] = 0;
      cell_level_[i] = 0;
      bfs.push_back(static_cast<int>(i));
    }
  while (!bfs.empty()) {
    const int c = bfs.front();
    bfs.pop_front();
    const int cx = c % gx_, cy = c / gx_;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = cx + dx, ny = cy + dy;
        if (nx < 0 || ny < 0 || nx >= gx_ || ny >= gy_) continue;
        const int n = ny * gx_ + nx;
        if (cell_level_[n] > cell_level_[c] + 1) {
          cell_level_[n] = cell_level_[c] + 1;
          bfs.push_back(n);
        }
      }
  }
  // Flood-fill connected components of non-boundary cells; classify each by
  // one exact even-odd test at a representative cell center.
  for (std::size_t i = 0; i < nc; ++i) {
    if (cell_state_[i] != 2) continue;
    std::vector<int> comp{static_cast<int>(i)};
    cell_state_[i] = 3; // visiting
    for (std::size_t k = 0; k < comp.size(); ++k) {
      const int c = comp[k];
      const int cx = c % gx_, cy = c / gx_;
      const int nbs[4] = {c - 1, c + 1, c - gx_, c + gx_};
      const bool ok[4] = {cx > 0, cx < gx_ - 1, cy > 0, cy < gy_ - 1};
      for (int t = 0; t < 4; ++t)
        if (ok[t] && cell_state_[nbs[t]] == 2) {
          cell_state_[nbs[t]] = 3;
          comp.push_back(nbs[t]);
        }
    }
    const int rep = comp.front();
    const Vec2 center{lo_[0] + (rep % gx_ + 0.5) * cell_, lo_[1] + (rep / gx_ + 0.5) * cell_};
    const std::int8_t state = inside_exact(center) ? 1 : -1;
    for (int c : comp) cell_state_[c] = state;
  }
}

int PolylineShape::cell_of(const Vec2& p) const {
  const int x = static_cast<int>((p[0] - lo_[0]) / cell_);
  const int y = static_cast<int>((p[1] - lo_[1]) / cell_);
  if (x < 0 || y < 0 || x >= gx_ || y >= gy_) return -1;
  return y * gx_ + x;
}

double PolylineShape::distance_lower_bound(const Vec2& p) const {
  const int c = cell_of(p);
  if (c < 0) return 0.0;
  const int lvl = cell_level_[c];
  return lvl <= 1 ? 0.0 : (lvl - 1) * cell_;
}

double PolylineShape::nearest_segment(const Vec2& p, int& seg_out) const {
  seg_out = -1;
  double best2 = std::numeric_limits<double>::max();
  int px = static_cast<int>((p[0] - lo_[0]) / cell_);
  int py = static_cast<int>((p[1] - lo_[1]) / cell_);
  px = std::clamp(px, 0, gx_ - 1);
  py = std::clamp(py, 0, gy_ - 1);
  const int kmax = std::max(gx_, gy_);
  // The BFS level bounds the ring where the first boundary cell can appear.
  const int k0 = std::max(0, static_cast<int>(cell_level_[py * gx_ + px]) - 1);
  for (int k = k0; k <= kmax; ++k) {
    if (seg_out >= 0) {
      const double ring_lb = (k - 1) * cell_;
      if (ring_lb > 0.0 && ring_lb * ring_lb > best2) break;
    }
    const int x0 = std::max(0, px - k), x1 = std::min(gx_ - 1, px + k);
    const int y0 = std::max(0, py - k), y1 = std::min(gy_ - 1, py + k);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        if (k > 0 && x != x0 && x != x1 && y != y0 && y != y1) continue; // ring only
        for (int si : cell_segs_[static_cast<std::size_t>(y) * gx_ + x]) {
          const auto& s = segs_[si];
          const double abx = s.b[0] - s.a[0], aby = s.b[1] - s.a[1];
          const double apx = p[0] - s.a[0], apy = p[1] - s.a[1];
          const double len2 = abx * abx + aby * aby;
          double t = len2 > 0.0 ? (apx * abx + apy * aby) / len2 : 0.0;
          t = std::clamp(t, 0.0, 1.0);
          const double dx = apx - t * abx, dy = apy - t * aby;
          const double d2 = dx * dx + dy * dy;
          if (d2 < best2) {
            best2 = d2;
            seg_out = si;
          }
        }
      }
  }
  return std::sqrt(best2);
}

bool PolylineShape::inside_exact(const Vec2& p) const {
  // Even-odd ray cast over all segments (used once per grid component).
  int crossings = 0;
  for (const auto& s : segs_) {
    const bool above_a = s.a[1] > p[1];
    const bool above_b = s.b[1] > p[1];
    if (above_a == above_b) continue;
    const double t = (p[1] - s.a[1]) / (s.b[1] - s.a[1]);
    if (s.a[0] + t * (s.b[0] - s.a[0]) > p[0]) ++crossings;
  }
  return (crossings & 1) != 0;
}

bool PolylineShape::inside(const Vec2& p) const {
  const int c = cell_of(p);
  if (c < 0) return false;
  if (cell_state_[c] == 1) return true;
  if (cell_state_[c] == -1) return false;
  // Near-boundary: side of the nearest segment.  Loops keep the domain on
  // their left, so a positive cross product means inside.
  int si;
  nearest_segment(p, si);
  const auto& s = segs_[si];
  const double cross = (s.b[0] - s.a[0]) * (p[1] - s.a[1]) - (s.b[1] - s.a[1]) * (p[0] - s.a[0]);
  return cross > 0.0;
}

bool PolylineShape::inside_fast(const Vec2& p) const { return inside(p); }

double PolylineShape::distance(const Vec2& p) const {
  int si;
  return nearest_segment(p, si);
}

double PolylineShape::signed_distance(const Vec2& p) const {
  const double d = distance(p);
  return inside(p) ? -d : d;
}

double PolylineShape::loop_gap(int li, int lj) const {
  double best = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < segs_.size(); i += 4) {
    const auto& s = segs_[i];
    if (s.loop != li) continue;
    for (const auto& t : segs_) {
      if (t.loop != lj) continue;
      for (const Vec2* q : {&s.a, &s.b}) {
        const double abx = t.b[0] - t.a[0], aby = t.b[1] - t.a[1];
        const double len2 = abx * abx + aby * aby;
        double u = len2 > 0 ? (((*q)[0] - t.a[0]) * abx + ((*q)[1] - t.a[1]) * aby) / len2 : 0.0;
        u = std::clamp(u, 0.0, 1.0);
        const double dx = (*q)[0] - (t.a[0] + u * abx), dy = (*q)[1] - (t.a[1] + u * aby);
        best = std::min(best, std::hypot(dx, dy));
      }
    }
  }
  return best;
}

} // namespace heatlab
