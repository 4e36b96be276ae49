#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "heatlab/domain.hpp"

namespace heatlab {

struct MeshBoundaryNode {
  int node = 0;
  int loop = 0;
  double theta = 0.0;      // curve parameter of the originating DomainSpec loop
  double arclength = 0.0;  // metric arclength along the loop
};

/// P1 triangulation of a domain in chart coordinates.  Triangles are
/// positively oriented; boundary nodes are stored loop-major in traversal
/// order and lie exactly on the spec'd curves.
struct MeshedDomain {
  AmbientChart chart;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<MeshBoundaryNode> boundary;
  double h_max = 0.0; // longest edge, chart-metric length
  int mesh_id = 0;

  std::size_t node_count() const { return nodes.size(); }
  bool is_boundary_node(int n) const;
};

/// Unstructured mesher (force-equilibrated Delaunay).  Guarantees
/// h_max <= 1.5*target_h and a minimum chart angle of 20 degrees, or throws.
MeshedDomain triangulate(const DomainSpec& d, double target_h);

/// Structured mesh of a latitude band u0(v) <= u <= u1(v) on the sphere chart
/// (v-periodic rows); used for band domains where the loops wrap the chart.
MeshedDomain band_mesh(const DomainSpec& d, double target_h);

/// Dispatches to band_mesh for wrapping domains, triangulate otherwise.
MeshedDomain mesh_domain(const DomainSpec& d, double target_h);

// Plain-text node/element list export/import (chart described in the header;
// custom charts are not serializable).
void write_mesh(std::ostream& os, const MeshedDomain& m);
MeshedDomain read_mesh(std::istream& is);

/// Triangle corners with the periodic v coordinate unwrapped relative to the
/// first corner (band meshes cross the chart seam).
std::array<Vec2, 3> triangle_corners(const MeshedDomain& m, std::size_t t);

/// Chart-metric area by the same midpoint quadrature used for assembly.
double mesh_area(const MeshedDomain& m);

/// Minimum interior angle over all triangles (degrees, chart coordinates).
double mesh_min_angle(const MeshedDomain& m);

} // namespace heatlab
