#include "heatlab/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "heatlab/polyline.hpp"

namespace heatlab {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

std::atomic<int> g_mesh_counter{1};

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// ---------------------------------------------------------------------------
// Incremental Delaunay (Bowyer-Watson with a walk locate).
// ---------------------------------------------------------------------------
class Delaunay {
 public:
  Delaunay(const Vec2& lo, const Vec2& hi) {
    const double w = std::max(hi[0] - lo[0], hi[1] - lo[1]);
    const Vec2 c{(lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2};
    // Super-triangle comfortably containing everything.
    pts_.push_back({c[0] - 20 * w, c[1] - 10 * w});
    pts_.push_back({c[0] + 20 * w, c[1] - 10 * w});
    pts_.push_back({c[0], c[1] + 20 * w});
    tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true, 0});
  }

  int insert(const Vec2& p) {
    const int pi = static_cast<int>(pts_.size());
    pts_.push_back(p);
    const int t0 = locate(p);
    ++epoch_;
    cavity_.clear();
    border_.clear();
    collect_cavity(t0, p);
    for (int t : cavity_) tris_[t].alive = false;
    // Fan p to every border edge; border edges keep the cavity on their left.
    std::unordered_map<int, std::pair<int, int>> half; // vertex -> (tri, slot)
    int first_new = -1;
    for (const auto& [a, b, outer] : border_) {
      const int nt = static_cast<int>(tris_.size());
      tris_.push_back({{pi, a, b}, {outer, -1, -1}, true, 0});
      if (first_new < 0) first_new = nt;
      if (outer >= 0) {
        Tri& o = tris_[outer];
        for (int s = 0; s < 3; ++s) {
          const int va = o.v[(s + 1) % 3], vb = o.v[(s + 2) % 3];
          if (va == b && vb == a) o.n[s] = nt;
        }
      }
      // Internal edges (p,a) and (b,p): pair through the shared vertex.
      for (const auto& [key, slot] : {std::pair<int, int>{a, 2}, std::pair<int, int>{b, 1}}) {
        auto it = half.find(key);
        if (it == half.end()) {
          half.emplace(key, std::make_pair(nt, slot));
        } else {
          tris_[nt].n[slot] = it->second.first;
          tris_[it->second.first].n[it->second.second] = nt;
          half.erase(it);
        }
      }
    }
    hint_ = first_new;
    return pi;
  }

  // Triangles not touching the super-triangle, vertex ids shifted by -3.
  std::vector<std::array<int, 3>> extract() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;
      out.push_back({t.v[0] - 3, t.v[1] - 3, t.v[2] - 3});
    }
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n; // neighbor opposite v[i]
    bool alive;
    unsigned mark;
  };

  int locate(const Vec2& p) const {
    int cur = hint_;
    if (cur < 0 || !tris_[cur].alive) {
      cur = -1;
      for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
        if (tris_[i].alive) {
          cur = i;
          break;
        }
    }
    const int max_steps = static_cast<int>(tris_.size()) + 8;
    int salt = 0;
    for (int step = 0; step < max_steps; ++step) {
      const Tri& t = tris_[cur];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int e = (k + salt) % 3;
        const Vec2& a = pts_[t.v[(e + 1) % 3]];
        const Vec2& b = pts_[t.v[(e + 2) % 3]];
        if (orient2d(a, b, p) < 0.0) {
          next = t.n[e];
          break;
        }
      }
      if (next < 0) return cur;
      cur = next;
      ++salt;
    }
    throw std::runtime_error("Delaunay walk failed to terminate");
  }

  bool in_circle(const Tri& t, const Vec2& p) const {
    const Vec2& a = pts_[t.v[0]];
    const Vec2& b = pts_[t.v[1]];
    const Vec2& c = pts_[t.v[2]];
    const double ax = a[0] - p[0], ay = a[1] - p[1];
    const double bx = b[0] - p[0], by = b[1] - p[1];
    const double cx = c[0] - p[0], cy = c[1] - p[1];
    const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    const double det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
    const double scale = (a2 + b2 + c2) * (a2 + b2 + c2);
    return det > 1e-14 * scale;
  }

  void collect_cavity(int t0, const Vec2& p) {
    stack_.clear();
    stack_.push_back(t0);
    tris_[t0].mark = epoch_;
    while (!stack_.empty()) {
      const int t = stack_.back();
      stack_.pop_back();
      cavity_.push_back(t);
      for (int e = 0; e < 3; ++e) {
        const int nb = tris_[t].n[e];
        const int a = tris_[t].v[(e + 1) % 3], b = tris_[t].v[(e + 2) % 3];
        if (nb < 0) {
          border_.emplace_back(a, b, nb);
          continue;
        }
        if (tris_[nb].mark == epoch_) continue;
        if (in_circle(tris_[nb], p)) {
          tris_[nb].mark = epoch_;
          stack_.push_back(nb);
        } else {
          border_.emplace_back(a, b, nb);
        }
      }
    }
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> cavity_, stack_;
  std::vector<std::tuple<int, int, int>> border_;
  unsigned epoch_ = 0;
  int hint_ = 0;
};

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& pts) {
  Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Vec2 hi{-lo[0], -lo[1]};
  for (const auto& p : pts) {
    lo[0] = std::min(lo[0], p[0]);
    lo[1] = std::min(lo[1], p[1]);
    hi[0] = std::max(hi[0], p[0]);
    hi[1] = std::max(hi[1], p[1]);
  }
  Delaunay dt(lo, hi);
  for (const auto& p : pts) dt.insert(p);
  return dt.extract();
}

double metric_edge_length(const AmbientChart& chart, const Vec2& a, const Vec2& b) {
  const Vec2 mid{(a[0] + b[0]) / 2, (a[1] + b[1]) / 2};
  const Vec2 e{b[0] - a[0], b[1] - a[1]};
  return chart.norm(mid, e);
}

// Deterministic tiny jitter to break lattice degeneracies.
double hash_jitter(unsigned i, unsigned salt) {
  unsigned x = i * 2654435761u + salt * 40503u + 1013904223u;
  x ^= x >> 16;
  x *= 2246822519u;
  x ^= x >> 13;
  return (static_cast<double>(x & 0xffffu) / 65535.0 - 0.5);
}

struct BoundaryResample {
  std::vector<Vec2> points;
  std::vector<MeshBoundaryNode> info; // node field filled later
  std::vector<int> loop_start;        // start index per loop (plus total at end)
};

// Uniform-arclength boundary nodes, exactly on the spec'd curves.  Polyline
// corners are pinned as nodes so polygonal boundaries are represented
// exactly.
BoundaryResample resample_boundary(const DomainSpec& d, double target_h) {
  BoundaryResample out;
  const int fine = 8192;
  for (std::size_t li = 0; li < d.loops().size(); ++li) {
    const ClosedCurve& c = d.loops()[li];
    // Cumulative metric arclength table over theta.
    std::vector<double> cum(fine + 1, 0.0);
    for (int i = 0; i < fine; ++i) {
      const double th = kTwoPi * (i + 0.5) / fine;
      const Vec2 p = c.position(th);
      const Vec2 dp = c.derivative(th);
      cum[i + 1] = cum[i] + d.chart().norm(p, dp) * (kTwoPi / fine);
    }
    const double len = cum[fine];
    if (len < 3.0 * target_h)
      throw std::invalid_argument("loop " + std::to_string(li) + " shorter than 3*target_h");

    auto s_of_theta = [&](double theta) {
      const double x = theta / kTwoPi * fine;
      const int j = std::clamp(static_cast<int>(x), 0, fine - 1);
      return cum[j] + (x - j) * (cum[j + 1] - cum[j]);
    };
    auto theta_of_s = [&](double s) {
      const auto it = std::upper_bound(cum.begin(), cum.end(), s);
      const int j = std::clamp(static_cast<int>(it - cum.begin()) - 1, 0, fine - 1);
      const double frac = (s - cum[j]) / std::max(cum[j + 1] - cum[j], 1e-300);
      return kTwoPi * (j + frac) / fine;
    };

    // Corner anchors for polylines (direction changes between sample edges).
    std::vector<double> anchors;
    if (c.kind() == CurveKind::polyline) {
      const auto& sm = c.samples();
      const std::size_t n = sm.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = sm[(i + n - 1) % n];
        const Vec2& b = sm[i];
        const Vec2& q = sm[(i + 1) % n];
        const Vec2 e1{b[0] - a[0], b[1] - a[1]};
        const Vec2 e2{q[0] - b[0], q[1] - b[1]};
        const double cross = e1[0] * e2[1] - e1[1] * e2[0];
        const double scale = std::hypot(e1[0], e1[1]) * std::hypot(e2[0], e2[1]);
        if (std::abs(cross) > 1e-9 * scale)
          anchors.push_back(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
      }
    }
    if (anchors.empty()) anchors.push_back(0.0);

    out.loop_start.push_back(static_cast<int>(out.points.size()));
    for (std::size_t a = 0; a < anchors.size(); ++a) {
      const double th0 = anchors[a];
      const double s0 = s_of_theta(th0);
      const double s1 = a + 1 < anchors.size() ? s_of_theta(anchors[a + 1]) : len;
      const int nseg = std::max(1, static_cast<int>(std::lround((s1 - s0) / target_h)));
      for (int k = 0; k < nseg; ++k) {
        const double s = s0 + (s1 - s0) * k / nseg;
        const double theta = k == 0 ? th0 : theta_of_s(s);
        out.points.push_back(c.position(theta));
        MeshBoundaryNode bn;
        bn.loop = static_cast<int>(li);
        bn.theta = theta;
        bn.arclength = s;
        out.info.push_back(bn);
      }
    }
    const int placed = static_cast<int>(out.points.size()) - out.loop_start.back();
    if (placed < 12) {
      // Too coarse: redo this loop with a uniform spread of 12 nodes.
      out.points.resize(out.loop_start.back());
      out.info.resize(out.loop_start.back());
      for (int k = 0; k < 12; ++k) {
        const double s = len * k / 12;
        const double theta = theta_of_s(s);
        out.points.push_back(c.position(theta));
        MeshBoundaryNode bn;
        bn.loop = static_cast<int>(li);
        bn.theta = theta;
        bn.arclength = s;
        out.info.push_back(bn);
      }
    }
  }
  out.loop_start.push_back(static_cast<int>(out.points.size()));
  return out;
}

struct TriQuality {
  double min_angle_deg;
  double h_max_metric;
};

TriQuality mesh_quality(const AmbientChart& chart, const std::vector<Vec2>& nodes,
                        const std::vector<std::array<int, 3>>& tris) {
  TriQuality q{180.0, 0.0};
  for (const auto& t : tris) {
    const Vec2& a = nodes[t[0]];
    const Vec2& b = nodes[t[1]];
    const Vec2& c = nodes[t[2]];
    const double la = std::hypot(c[0] - b[0], c[1] - b[1]);
    const double lb = std::hypot(c[0] - a[0], c[1] - a[1]);
    const double lc = std::hypot(b[0] - a[0], b[1] - a[1]);
    auto angle = [](double opp, double s1, double s2) {
      const double x = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0);
      return std::acos(x) * 180.0 / 3.14159265358979323846;
    };
    q.min_angle_deg = std::min({q.min_angle_deg, angle(la, lb, lc), angle(lb, la, lc),
                                angle(lc, la, lb)});
    q.h_max_metric = std::max({q.h_max_metric, metric_edge_length(chart, a, b),
                               metric_edge_length(chart, b, c), metric_edge_length(chart, c, a)});
  }
  return q;
}

MeshedDomain triangulate_attempt(const DomainSpec& d, double target_h, double contract_h,
                                 unsigned salt) {
  const AmbientChart& chart = d.chart();
  BoundaryResample br = resample_boundary(d, target_h);
  PolylineShape shape(d, 4096);

  if (d.loop_count() > 1) {
    for (std::size_t i = 0; i < d.loop_count(); ++i)
      for (std::size_t j = i + 1; j < d.loop_count(); ++j)
        if (shape.loop_gap(static_cast<int>(i), static_cast<int>(j)) < 2.0 * target_h)
          throw std::invalid_argument("loop spacing below 2*target_h: domain is unmeshable at this resolution");
  }

  // Hex-lattice seed, mirror-symmetric about the bounding-box center so that
  // symmetric domains get symmetric meshes (and hence exactly symmetric
  // discrete solutions).  Column spacing is metric-corrected on the sphere.
  std::vector<Vec2> pts = br.points;
  const int n_fixed = static_cast<int>(pts.size());
  const Vec2 lo = shape.bbox_lo(), hi = shape.bbox_hi();
  const Vec2 cen{(lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2};
  const double dy = target_h * std::sqrt(3.0) / 2.0;
  const double amp = salt == 0 ? 0.0 : 0.02; // retries jitter the lattice
  const int imax = static_cast<int>((hi[0] - cen[0]) / dy) + 1;
  for (int si = -imax; si < imax; ++si) {
    const int mi = si >= 0 ? si : -1 - si; // mirror row index
    const double u = cen[0] + (si + 0.5) * dy;
    double metric_stretch = 1.0;
    if (chart.kind() == ChartKind::sphere)
      metric_stretch = std::max(std::sin(u), 0.05);
    const double dx = target_h / metric_stretch;
    const double off = (mi % 2) ? 0.5 : 0.0;
    const int jmax = static_cast<int>((hi[1] - cen[1]) / dx) + 2;
    for (int sj = -jmax; sj <= jmax; ++sj) {
      Vec2 p{u + amp * target_h * hash_jitter(static_cast<unsigned>(si + 40000) * 7919u +
                                                  static_cast<unsigned>(sj + 40000),
                                              salt),
             cen[1] + (sj + off) * dx +
                 amp * dx * hash_jitter(static_cast<unsigned>(si + 40000) * 104729u +
                                            static_cast<unsigned>(sj + 40000),
                                        salt + 1)};
      if (p[0] <= lo[0] || p[0] >= hi[0] || p[1] <= lo[1] || p[1] >= hi[1]) continue;
      if (!shape.inside(p)) continue;
      // Exact clearance check only near the boundary.
      if (shape.distance_lower_bound(p) < 0.71 * target_h &&
          shape.distance(p) < 0.71 * target_h)
        continue;
      pts.push_back(p);
    }
  }

  // Force relaxation toward uniform metric edge length (repulsive only).
  const double L0 = 1.2 * target_h;
  const double dt = 0.2;
  std::vector<Vec2> force(pts.size());
  std::vector<std::array<int, 3>> tris;
  for (int iter = 0; iter < 90; ++iter) {
    tris = delaunay_triangulate(pts);
    // Keep triangles whose centroid lies inside.
    std::vector<std::array<int, 3>> kept;
    kept.reserve(tris.size());
    for (const auto& t : tris) {
      const Vec2 cen{(pts[t[0]][0] + pts[t[1]][0] + pts[t[2]][0]) / 3.0,
                     (pts[t[0]][1] + pts[t[1]][1] + pts[t[2]][1]) / 3.0};
      if (shape.inside(cen)) kept.push_back(t);
    }
    tris.swap(kept);

    // Unique edges.
    std::vector<std::uint64_t> ekeys;
    ekeys.reserve(tris.size() * 3);
    for (const auto& t : tris)
      for (int e = 0; e < 3; ++e) {
        const int a = t[e], b = t[(e + 1) % 3];
        ekeys.push_back((static_cast<std::uint64_t>(std::min(a, b)) << 32) |
                        static_cast<std::uint32_t>(std::max(a, b)));
      }
    std::sort(ekeys.begin(), ekeys.end());
    ekeys.erase(std::unique(ekeys.begin(), ekeys.end()), ekeys.end());

    std::fill(force.begin(), force.end(), Vec2{0, 0});
    for (const auto key : ekeys) {
      const int a = static_cast<int>(key >> 32);
      const int b = static_cast<int>(key & 0xffffffffu);
      const Vec2& pa = pts[a];
      const Vec2& pb = pts[b];
      const double L = metric_edge_length(chart, pa, pb);
      const double f = std::max(L0 - L, 0.0);
      if (f <= 0.0) continue;
      const double Lc = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
      const Vec2 dir{(pa[0] - pb[0]) / Lc, (pa[1] - pb[1]) / Lc};
      force[a][0] += f * dir[0];
      force[a][1] += f * dir[1];
      force[b][0] -= f * dir[0];
      force[b][1] -= f * dir[1];
    }
    double max_move = 0.0;
    for (std::size_t i = n_fixed; i < pts.size(); ++i) {
      pts[i][0] += dt * force[i][0];
      pts[i][1] += dt * force[i][1];
      if (shape.inside(pts[i]) && shape.distance_lower_bound(pts[i]) > 0.3 * target_h) {
        max_move = std::max(max_move, dt * std::hypot(force[i][0], force[i][1]));
        continue;
      }
      double sd = shape.signed_distance(pts[i]);
      if (sd > -0.3 * target_h) {
        // Pull escapers back inside along the numeric distance gradient.
        const double eps = 1e-6 * target_h;
        const double gx = (shape.signed_distance({pts[i][0] + eps, pts[i][1]}) -
                           shape.signed_distance({pts[i][0] - eps, pts[i][1]})) /
                          (2 * eps);
        const double gy = (shape.signed_distance({pts[i][0], pts[i][1] + eps}) -
                           shape.signed_distance({pts[i][0], pts[i][1] - eps})) /
                          (2 * eps);
        const double gn = std::max(std::hypot(gx, gy), 1e-12);
        const double shift = sd + 0.45 * target_h;
        pts[i][0] -= shift * gx / gn;
        pts[i][1] -= shift * gy / gn;
      }
      max_move = std::max(max_move, dt * std::hypot(force[i][0], force[i][1]));
    }
    if (max_move < 1e-3 * target_h && iter > 4) break;
  }

  tris = delaunay_triangulate(pts);
  {
    std::vector<std::array<int, 3>> kept;
    for (const auto& t : tris) {
      const Vec2 cen{(pts[t[0]][0] + pts[t[1]][0] + pts[t[2]][0]) / 3.0,
                     (pts[t[0]][1] + pts[t[1]][1] + pts[t[2]][1]) / 3.0};
      if (shape.inside(cen)) kept.push_back(t);
    }
    tris.swap(kept);
  }

  // Drop unreferenced interior points (filtered-out orphans).
  std::vector<int> remap(pts.size(), -1);
  for (const auto& t : tris)
    for (int v : t) remap[v] = 1;
  for (int i = 0; i < n_fixed; ++i)
    if (remap[i] < 0) throw std::runtime_error("boundary node lost during meshing");
  MeshedDomain m;
  m.chart = chart;
  int next = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (remap[i] > 0) {
      remap[i] = next++;
      m.nodes.push_back(pts[i]);
    }
  for (auto& t : tris) {
    for (int& v : t) v = remap[v];
    if (orient2d(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]) < 0.0) std::swap(t[1], t[2]);
  }
  m.triangles = std::move(tris);
  m.boundary = br.info;
  for (int i = 0; i < n_fixed; ++i) m.boundary[i].node = remap[i];

  // Boundary edges must appear in the triangulation as consecutive pairs.
  std::vector<std::uint64_t> edge_set;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      edge_set.push_back((static_cast<std::uint64_t>(std::min(a, b)) << 32) |
                         static_cast<std::uint32_t>(std::max(a, b)));
    }
  std::sort(edge_set.begin(), edge_set.end());
  for (std::size_t li = 0; li + 1 < br.loop_start.size(); ++li) {
    const int s0 = br.loop_start[li], s1 = br.loop_start[li + 1];
    for (int k = s0; k < s1; ++k) {
      const int a = m.boundary[k].node;
      const int b = m.boundary[(k + 1 - s0) % (s1 - s0) + s0].node;
      const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
                                static_cast<std::uint32_t>(std::max(a, b));
      if (!std::binary_search(edge_set.begin(), edge_set.end(), key))
        throw std::runtime_error("boundary cycle broken in triangulation");
    }
  }

  const TriQuality q = mesh_quality(chart, m.nodes, m.triangles);
  if (q.min_angle_deg < 20.0)
    throw std::runtime_error("mesh quality below 20 degrees (got " +
                             std::to_string(q.min_angle_deg) + ")");
  if (q.h_max_metric > 1.5 * contract_h)
    throw std::runtime_error("mesh h_max exceeds 1.5*target_h");
  m.h_max = q.h_max_metric;
  m.mesh_id = g_mesh_counter.fetch_add(1);
  return m;
}

} // namespace

bool MeshedDomain::is_boundary_node(int n) const {
  for (const auto& b : boundary)
    if (b.node == n) return true;
  return false;
}

MeshedDomain triangulate(const DomainSpec& d, double target_h) {
  if (!(target_h > 0.0)) throw std::invalid_argument("target_h must be positive");
  if (d.is_band()) return band_mesh(d, target_h);
  if (d.chart().kind() == ChartKind::hyperbolic || d.chart().kind() == ChartKind::custom)
    throw std::invalid_argument("unstructured meshing supports euclidean and sphere charts only");
  // Retry schedule: first shrink the internal spacing (h_max contract), then
  // jitter the lattice (quality degeneracies).
  static const struct { double shrink; unsigned salt; } kAttempts[] = {
      {1.0, 0}, {0.85, 0}, {0.85, 1}, {0.72, 1}, {0.72, 2}};
  std::string last_error;
  for (const auto& a : kAttempts) {
    try {
      return triangulate_attempt(d, target_h * a.shrink, target_h, a.salt * 7771u);
    } catch (const std::invalid_argument&) {
      throw; // contract violations are not retried
    } catch (const std::runtime_error& e) {
      last_error = e.what();
    }
  }
  throw std::runtime_error("triangulate failed after 5 attempts: " + last_error);
}

MeshedDomain mesh_domain(const DomainSpec& d, double target_h) {
  return d.is_band() ? band_mesh(d, target_h) : triangulate(d, target_h);
}

MeshedDomain band_mesh(const DomainSpec& d, double target_h) {
  if (!d.is_band()) throw std::invalid_argument("band_mesh needs a wrapping band domain");
  const AmbientChart& chart = d.chart();
  const ClosedCurve& lower = d.loops()[0];
  const ClosedCurve& upper = d.loops()[1];

  // u-profiles of the two boundary loops as functions of v (theta mapping
  // fixed by the loop orientation: lower runs in -v, upper in +v).
  auto u_of_v = [&](const ClosedCurve& c, bool reversed_loop, double v) {
    const double theta = reversed_loop ? std::fmod(kTwoPi - v, kTwoPi) : v;
    return c.position(theta)[0];
  };

  double u_mid = 0.0;
  for (const auto& p : lower.samples()) u_mid += p[0];
  for (const auto& p : upper.samples()) u_mid += p[0];
  u_mid /= static_cast<double>(lower.sample_count() + upper.sample_count());

  const double span = u_of_v(upper, false, 0.0) - u_of_v(lower, true, 0.0);
  const int nu = std::max(4, static_cast<int>(std::lround(span / target_h)));
  const int nv = std::max(8, static_cast<int>(std::lround(kTwoPi * std::sin(u_mid) / target_h)));

  MeshedDomain m;
  m.chart = chart;
  m.nodes.resize(static_cast<std::size_t>(nu + 1) * nv);
  auto id = [&](int i, int j) { return i * nv + ((j % nv) + nv) % nv; };
  for (int j = 0; j < nv; ++j) {
    const double v = kTwoPi * j / nv;
    const double ulo = u_of_v(lower, true, v);
    const double uhi = u_of_v(upper, false, v);
    for (int i = 0; i <= nu; ++i) {
      const double u = ulo + (uhi - ulo) * i / nu;
      m.nodes[id(i, j)] = {u, v};
    }
  }
  // Quad split along a fixed diagonal; positively oriented in the unwrapped
  // (u, v) coordinates by construction (u and v both increase).
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }

  // Boundary metadata: lower loop first (traversed in its own theta order).
  for (int j = 0; j < nv; ++j) {
    const double v = kTwoPi * j / nv;
    MeshBoundaryNode bn;
    bn.node = id(0, j);
    bn.loop = 0;
    bn.theta = std::fmod(kTwoPi - v, kTwoPi);
    m.boundary.push_back(bn);
  }
  for (int j = 0; j < nv; ++j) {
    const double v = kTwoPi * j / nv;
    MeshBoundaryNode bn;
    bn.node = id(nu, j);
    bn.loop = 1;
    bn.theta = v;
    m.boundary.push_back(bn);
  }
  // Arclengths along each loop (metric).
  for (int li = 0; li < 2; ++li) {
    double arc = 0.0;
    const int off = li * nv;
    for (int j = 0; j < nv; ++j) {
      m.boundary[off + j].arclength = arc;
      const Vec2& a = m.nodes[m.boundary[off + j].node];
      const Vec2& b = m.nodes[m.boundary[off + (j + 1) % nv].node];
      Vec2 e{b[0] - a[0], b[1] - a[1]};
      if (e[1] > 3.0) e[1] -= kTwoPi;
      if (e[1] < -3.0) e[1] += kTwoPi;
      arc += chart.norm({(a[0] + b[0]) / 2, a[1] + e[1] / 2}, e);
    }
  }

  double hmax = 0.0;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      const Vec2& a = m.nodes[t[e]];
      const Vec2& b = m.nodes[t[(e + 1) % 3]];
      Vec2 diff{b[0] - a[0], b[1] - a[1]};
      if (diff[1] > 3.0) diff[1] -= kTwoPi;
      if (diff[1] < -3.0) diff[1] += kTwoPi;
      hmax = std::max(hmax, chart.norm({(a[0] + b[0]) / 2, a[1] + diff[1] / 2}, diff));
    }
  m.h_max = hmax;
  m.mesh_id = g_mesh_counter.fetch_add(1);
  return m;
}

std::array<Vec2, 3> triangle_corners(const MeshedDomain& m, std::size_t t) {
  std::array<Vec2, 3> c{m.nodes[m.triangles[t][0]], m.nodes[m.triangles[t][1]],
                        m.nodes[m.triangles[t][2]]};
  if (m.chart.v_period()) {
    const double per = *m.chart.v_period();
    for (int k = 1; k < 3; ++k) {
      while (c[k][1] - c[0][1] > per / 2) c[k][1] -= per;
      while (c[k][1] - c[0][1] < -per / 2) c[k][1] += per;
    }
  }
  return c;
}

double mesh_area(const MeshedDomain& m) {
  double area = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto c = triangle_corners(m, t);
    const double A = 0.5 * std::abs(orient2d(c[0], c[1], c[2]));
    const Vec2 m01{(c[0][0] + c[1][0]) / 2, (c[0][1] + c[1][1]) / 2};
    const Vec2 m12{(c[1][0] + c[2][0]) / 2, (c[1][1] + c[2][1]) / 2};
    const Vec2 m20{(c[2][0] + c[0][0]) / 2, (c[2][1] + c[0][1]) / 2};
    area += A / 3.0 *
            (m.chart.sqrt_det(m01[0], m01[1]) + m.chart.sqrt_det(m12[0], m12[1]) +
             m.chart.sqrt_det(m20[0], m20[1]));
  }
  return area;
}

double mesh_min_angle(const MeshedDomain& m) {
  return mesh_quality(m.chart, m.nodes, m.triangles).min_angle_deg;
}

void write_mesh(std::ostream& os, const MeshedDomain& m) {
  os << "heatlab-mesh 1\n";
  switch (m.chart.kind()) {
    case ChartKind::euclidean: os << "chart euclidean\n"; break;
    case ChartKind::sphere: os << "chart sphere\n"; break;
    case ChartKind::hyperbolic: os << "chart hyperbolic\n"; break;
    case ChartKind::custom: throw std::invalid_argument("custom charts are not serializable");
  }
  os.precision(17);
  os << "nodes " << m.nodes.size() << "\n";
  for (const auto& p : m.nodes) os << p[0] << " " << p[1] << "\n";
  os << "triangles " << m.triangles.size() << "\n";
  for (const auto& t : m.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "boundary " << m.boundary.size() << "\n";
  for (const auto& b : m.boundary)
    os << b.node << " " << b.loop << " " << b.theta << " " << b.arclength << "\n";
  os << "hmax " << m.h_max << "\n";
}

MeshedDomain read_mesh(std::istream& is) {
  std::string tag;
  int version;
  is >> tag >> version;
  if (tag != "heatlab-mesh" || version != 1) throw std::runtime_error("not a heatlab mesh file");
  std::string kind;
  is >> tag >> kind;
  MeshedDomain m;
  if (kind == "euclidean")
    m.chart = AmbientChart::euclidean();
  else if (kind == "sphere")
    m.chart = AmbientChart::sphere();
  else if (kind == "hyperbolic")
    m.chart = AmbientChart::hyperbolic();
  else
    throw std::runtime_error("unknown chart kind: " + kind);
  std::size_t n;
  is >> tag >> n;
  m.nodes.resize(n);
  for (auto& p : m.nodes) is >> p[0] >> p[1];
  is >> tag >> n;
  m.triangles.resize(n);
  for (auto& t : m.triangles) is >> t[0] >> t[1] >> t[2];
  is >> tag >> n;
  m.boundary.resize(n);
  for (auto& b : m.boundary) is >> b.node >> b.loop >> b.theta >> b.arclength;
  is >> tag >> m.h_max;
  if (!is) throw std::runtime_error("truncated mesh file");
  m.mesh_id = g_mesh_counter.fetch_add(1);
  return m;
}

} // namespace heatlab
