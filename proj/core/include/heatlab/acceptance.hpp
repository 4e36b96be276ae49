#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace heatlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail; // measured values vs thresholds
  double seconds = 0.0;
};

/// Runs the full verification battery (closed forms, hierarchy, moment-heat
/// identities, spectral fits, small-time layer, first-variation cross-checks,
/// CFP separation, Rellich identity, band cross-validation, polynomial
/// verifier, Monte Carlo, and the ball-maximality comparison).  Progress is
/// streamed to `log` as one line per criterion.
std::vector<CriterionResult> run_acceptance_battery(std::ostream& log);

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace heatlab
