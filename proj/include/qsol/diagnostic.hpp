#pragma once

#include <string>
#include <vector>

namespace qsol {

/// Outcome of one sampled check.
struct DiagnosticReport {
  std::string name;
  bool pass = true;
  /// Human-readable description of the worst sample, empty when none.
  std::string worst_sample;
  /// Location of the worst sample (radius or parameter value).
  double worst_location = 0.0;
  /// Measured quantity at the worst sample (ratio, slack, mass fraction...).
  double worst_value = 0.0;
  double tolerance = 0.0;
};

bool all_pass(const std::vector<DiagnosticReport>& reports);

}  // namespace qsol
