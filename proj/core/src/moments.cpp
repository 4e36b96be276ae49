#include "heatlab/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace heatlab {

MomentTable exit_hierarchy(const AssembledSystem& sys, int K) {
  if (K < 1) throw std::invalid_argument("hierarchy order K must be >= 1");
  MomentTable table;
  table.K = K;
  DirichletSolver solver(sys);
  FluxRecovery rec(sys);
  Vector prev = Vector::Ones(sys.n_full());
  for (int k = 1; k <= K; ++k) {
    const Vector rhs = static_cast<double>(k) * prev;
    Field Ek;
    try {
      Ek = solver.solve_poisson(rhs, FieldMeaning::exit_function);
    } catch (const std::exception& e) {
      throw std::runtime_error("hierarchy level " + std::to_string(k) + ": " + e.what());
    }
    const double Tk = sys.quadrature(Ek.values);
    // Interior positivity (maximum principle for the continuous problem).
    double min_inner = 0.0;
    for (int i : sys.reduced_to_full) min_inner = std::min(min_inner, Ek.values[i]);
    if (min_inner < -1e-10 * std::max(1.0, Ek.values.maxCoeff()))
      throw std::runtime_error("hierarchy level " + std::to_string(k) +
                               " lost interior positivity");
    table.flux.push_back(rec.recover(Ek.values, rhs));
    table.T.push_back(Tk);
    prev = Ek.values;
    table.E.push_back(std::move(Ek));
  }
  return table;
}

MomentHeatCheck verify_moment_heat_identity(const MomentTable& table, const HeatTimeline& tl,
                                            int k, double lambda1, double tolerance,
                                            int probes) {
  if (k < 1 || k > table.K) throw std::invalid_argument("moment order outside the table");
  const double Tk = table.T[k - 1];

  const LaplaceResult integral = weighted_time_integral(tl.times, tl.content, k, lambda1);
  if (std::abs(integral.tail) * k > 0.5 * tolerance * Tk) {
    // Report the horizon that would push the tail below half the tolerance.
    double T = tl.times.back();
    const TailFit tail = fit_tail_amplitude(tl.times, tl.content, lambda1);
    while (tail.amplitude * std::exp(-lambda1 * T) * k * std::pow(T, k - 1) / lambda1 >
           0.5 * tolerance * Tk)
      T *= 1.5;
    throw std::runtime_error("timeline horizon too short for the k=" + std::to_string(k) +
                             " identity; need t_max >= " + std::to_string(T));
  }

  MomentHeatCheck out;
  out.integral = k * integral.value;
  out.tail = k * integral.tail;
  out.discrepancy = std::abs(Tk - out.integral) / Tk;

  // Pointwise identity at interior probe nodes (farthest-spread selection).
  if (!tl.fields.empty() && probes > 0) {
    const AssembledSystem& sys = *tl.sys;
    std::vector<int> probe_nodes;
    const int stride = std::max<int>(1, sys.n_reduced() / probes);
    for (int i = 0; i < probes && i * stride < sys.n_reduced(); ++i)
      probe_nodes.push_back(sys.reduced_to_full[i * stride]);
    for (int node : probe_nodes) {
      std::vector<double> trace(tl.times.size());
      for (std::size_t j = 0; j < tl.times.size(); ++j) trace[j] = tl.fields[j][node];
      const LaplaceResult pi = weighted_time_integral(tl.times, trace, k, lambda1);
      const double lhs = table.E[k - 1].values[node];
      const double scale = std::max(std::abs(lhs), 1e-12 * Tk);
      out.pointwise_gap.push_back(std::abs(lhs - k * pi.value) / scale);
    }
  }
  return out;
}

} // namespace heatlab
