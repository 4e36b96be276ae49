#include "heatlab/radial.hpp"

#include <cmath>
#include <stdexcept>

#include "heatlab/heat.hpp"

namespace heatlab {

RadialGrid RadialGrid::uniform(const TubeProfile& p, int intervals) {
  if (intervals < 8) throw std::invalid_argument("radial grid needs at least 8 intervals");
  RadialGrid g{p, {}, p.reflected()};
  // Singular densities keep a relative cutoff; the regularity condition
  // J u' -> 0 is the natural boundary condition of the weak form there.
  const double rho = p.origin_order() >= 1 ? 1e-6 * p.radius() : 0.0;
  g.nodes.resize(intervals + 1);
  for (int i = 0; i <= intervals; ++i)
    g.nodes[i] = rho + (p.radius() - rho) * i / intervals;
  return g;
}

AssembledSystem assemble(const RadialGrid& g) {
  const int n = static_cast<int>(g.nodes.size());
  if (n < 2) throw std::invalid_argument("radial grid too small");
  const double factor = g.reflected ? 2.0 : 1.0;

  // Spot-check the profile's origin order against the density's behavior.
  {
    const int m = g.profile.origin_order();
    const double r = g.nodes.front() + 0.25 * (g.nodes[1] - g.nodes[0]) + 1e-12;
    const double ratio = g.profile.density(2 * r) / g.profile.density(r);
    const double expect = std::pow(2.0, m);
    if (m >= 1 && std::abs(ratio / expect - 1.0) > 0.5)
      throw std::invalid_argument("profile density inconsistent with origin_order near r=0");
  }

  AssembledSystem sys;
  std::vector<Eigen::Triplet<double>> tm, ts;
  // Two-point Gauss per element with the J weight.
  const double gp = 1.0 / std::sqrt(3.0);
  for (int e = 0; e + 1 < n; ++e) {
    const double a = g.nodes[e], b = g.nodes[e + 1];
    const double h = b - a, mid = (a + b) / 2;
    double Mloc[2][2] = {};
    double Sloc[2][2] = {};
    for (int q = 0; q < 2; ++q) {
      const double r = mid + (q == 0 ? -gp : gp) * h / 2;
      const double w = factor * g.profile.density(r) * h / 2;
      const double lam[2] = {(b - r) / h, (r - a) / h};
      const double dlam[2] = {-1.0 / h, 1.0 / h};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          Mloc[i][j] += w * lam[i] * lam[j];
          Sloc[i][j] += w * dlam[i] * dlam[j];
        }
    }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        tm.emplace_back(e + i, e + j, Mloc[i][j]);
        ts.emplace_back(e + i, e + j, Sloc[i][j]);
      }
  }
  sys.M.resize(n, n);
  sys.S.resize(n, n);
  sys.M.setFromTriplets(tm.begin(), tm.end());
  sys.S.setFromTriplets(ts.begin(), ts.end());

  sys.dirichlet = {n - 1};
  MeshBoundaryNode bn;
  bn.node = n - 1;
  bn.loop = 0;
  bn.theta = 0.0;
  bn.arclength = 0.0;
  sys.boundary_info = {bn};
  sys.boundary_mass.resize(1, 1);
  sys.boundary_mass.insert(0, 0) = factor * g.profile.density(g.profile.radius());
  sys.boundary_mass.makeCompressed();

  const double diam = (g.reflected ? 2.0 : 2.0) * g.profile.radius();
  sys.scale2 = diam * diam;
  sys.mesh_id = -(1000 + n); // radial systems use negative ids

  sys.full_to_reduced.assign(n, 0);
  sys.full_to_reduced[n - 1] = -1;
  sys.reduced_to_full.clear();
  for (int i = 0; i + 1 < n; ++i) {
    sys.full_to_reduced[i] = i;
    sys.reduced_to_full.push_back(i);
  }
  sys.boundary_weight = {factor * g.profile.density(g.profile.radius())};
  sys.area = sys.quadrature(Vector::Ones(n));
  return sys;
}

RadialSolution radial_solve(const RadialGrid& g, RadialProblem problem, int K_or_steps,
                            const std::vector<double>& times) {
  const AssembledSystem sys = assemble(g);
  RadialSolution out;
  switch (problem) {
    case RadialProblem::torsion_hierarchy: {
      DirichletSolver solver(sys);
      FluxRecovery rec(sys);
      Vector prev = Vector::Ones(sys.n_full());
      for (int k = 1; k <= K_or_steps; ++k) {
        const Vector rhs = static_cast<double>(k) * prev;
        Field Ek = solver.solve_poisson(rhs, FieldMeaning::exit_function);
        out.flux_at_R.push_back(rec.recover(Ek.values, rhs)[0]);
        out.fields.push_back(Ek.values);
        prev = Ek.values;
      }
      break;
    }
    case RadialProblem::heat: {
      if (times.empty()) throw std::invalid_argument("radial heat solve needs target times");
      double tmax = 0.0;
      for (double t : times) tmax = std::max(t, tmax);
      const TimeGrid grid = TimeGrid::geometric(1e-5 * sys.scale2, tmax, K_or_steps > 0 ? K_or_steps : 200);
      const HeatTimeline tl = solve_heat(sys, grid);
      for (double t : times) {
        // Snapshot at the nearest grid time.
        std::size_t best = 1;
        for (std::size_t j = 1; j < tl.times.size(); ++j)
          if (std::abs(std::log(tl.times[j] / t)) < std::abs(std::log(tl.times[best] / t)))
            best = j;
        out.fields.push_back(tl.fields[best]);
        out.flux_at_R.push_back(tl.flux[best][0]);
      }
      break;
    }
    case RadialProblem::eigen: {
      const EigenPair ep = smallest_eigenpair(sys);
      out.lambda1 = ep.lambda;
      out.fields.push_back(ep.phi.values);
      break;
    }
  }
  return out;
}

} // namespace heatlab
