#pragma once

#include <cstdint>
#include <vector>

#include "heatlab/domain.hpp"

namespace heatlab {

/// Dense polyline rendering of a domain's boundary in chart coordinates, with
/// a uniform classification grid for fast inside tests and distance queries.
/// Queries are const and safe to call concurrently.  Wrapping (band) loops
/// are not supported.
class PolylineShape {
 public:
  explicit PolylineShape(const DomainSpec& d, int samples_per_loop = 2048,
                         int grid_resolution = 384);

  /// Exact (at polyline resolution) inside test.
  bool inside(const Vec2& p) const;
  /// Exact unsigned distance to the boundary polyline.
  double distance(const Vec2& p) const;
  /// Negative inside.
  double signed_distance(const Vec2& p) const;
  /// O(1) lower bound for distance(p) from the precomputed grid.
  double distance_lower_bound(const Vec2& p) const;
  /// Cheap inside test for points farther from the boundary than the lower
  /// bound; exact everywhere (falls back to the nearest-segment side test).
  bool inside_fast(const Vec2& p) const;

  double loop_gap(int li, int lj) const;

  const Vec2& bbox_lo() const { return lo_; }
  const Vec2& bbox_hi() const { return hi_; }

 private:
  struct Segment {
    Vec2 a, b;
    int loop;
  };

  int cell_of(const Vec2& p) const; // -1 if outside the padded bbox
  double nearest_segment(const Vec2& p, int& seg_out) const;
  bool inside_exact(const Vec2& p) const;

  std::vector<Segment> segs_;
  Vec2 lo_{0, 0}, hi_{0, 0};
  int gx_ = 0, gy_ = 0;
  double cell_ = 0.0;
  std::vector<std::vector<int>> cell_segs_;
  std::vector<std::int8_t> cell_state_;   // -1 outside, +1 inside, 0 near boundary
  std::vector<std::uint16_t> cell_level_; // BFS distance to the nearest boundary cell
};

} // namespace heatlab
