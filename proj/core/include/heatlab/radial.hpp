#pragma once

#include "heatlab/fem.hpp"
#include "heatlab/tube.hpp"

namespace heatlab {

/// 1D discretization of a tube profile on [rho, R] with J-weighted P1
/// elements.  rho is 1e-6*R for singular densities (origin_order >= 1) and 0
/// for hypersurface souls; the origin carries the natural no-flux condition
/// J u' -> 0, the outer end r = R is the Dirichlet boundary.
/// For reflected (two-sided) tubes all integrals carry a factor 2 so that
/// reported quantities are per unit soul volume of the full tube.
struct RadialGrid {
  TubeProfile profile;
  std::vector<double> nodes; // rho = r_0 < ... < r_M = R
  bool reflected = false;

  static RadialGrid uniform(const TubeProfile& p, int intervals);
};

/// Builds the shared discretization (M, S, boundary data) for a radial grid.
/// The single Dirichlet dof is the outer radius; its boundary "mass" is the
/// equidistant volume J(R) (doubled when reflected).
AssembledSystem assemble(const RadialGrid& g);

enum class RadialProblem { torsion_hierarchy, heat, eigen };

/// Convenience driver mirroring the 1D reduction surface: solves the torsion
/// hierarchy (fields E_1..E_K), the heat problem (temperature snapshots), or
/// the smallest eigenpair on the grid.  The heavier post-processing lives in
/// the heat/moments modules, which accept the assembled radial system
/// directly.
struct RadialSolution {
  std::vector<Vector> fields; // per level k or per requested time
  std::vector<double> flux_at_R;
  double lambda1 = 0.0;
};
RadialSolution radial_solve(const RadialGrid& g, RadialProblem problem, int K_or_steps = 1,
                            const std::vector<double>& times = {});

} // namespace heatlab
