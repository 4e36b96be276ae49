#pragma once

#include "heatlab/fem.hpp"
#include "heatlab/heat.hpp"

namespace heatlab {

/// Exit-time hierarchy: E_0 = 1 and (positive Laplacian) E_k = k E_{k-1} with
/// Dirichlet boundary; T_k = integral of E_k dv.
struct MomentTable {
  int K = 0;
  std::vector<Field> E;                   // E_1..E_K
  std::vector<double> T;                  // T_1..T_K
  std::vector<std::vector<double>> flux;  // dE_k/dN per boundary node
};

/// Sequential Dirichlet solves; fluxes recovered variationally with data
/// k E_{k-1}.  Positivity of each level is enforced (interior minimum
/// > -1e-10 * scale).
MomentTable exit_hierarchy(const AssembledSystem& sys, int K);

struct MomentHeatCheck {
  double discrepancy = 0.0;               // |T_k - k int t^{k-1} H dt| / T_k
  double integral = 0.0;                  // the time-integral side
  double tail = 0.0;                      // analytic tail part of the integral
  std::vector<double> pointwise_gap;      // relative gaps at the probe nodes
};

/// Checks T_k = k int_0^inf t^{k-1} H(t) dt with the exponential-law tail
/// completion, plus the pointwise identity at `probes` interior nodes.
/// Throws if the tail estimate exceeds half of `tolerance` (horizon too
/// short), reporting the required t_max.
MomentHeatCheck verify_moment_heat_identity(const MomentTable& table, const HeatTimeline& tl,
                                            int k, double lambda1, double tolerance = 2e-2,
                                            int probes = 5);

} // namespace heatlab
