#pragma once

#include <string>
#include <vector>

#include "dirnet/output.hpp"
#include "dirnet/scenario.hpp"

namespace dirnet {

/// Outcome of one acceptance check. A check passes when `measured` is within
/// `tolerance` (as described by `comparison`) and it ran within its time budget.
struct CheckResult {
  std::string id;
  std::string description;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string comparison;  // "<=" or a short rule such as "interior"
  bool value_ok = false;
  double seconds = 0.0;
  double time_limit = 0.0;
  std::string detail;

  bool passed() const { return value_ok && seconds <= time_limit; }
};

struct ValidationOptions {
  int jobs = 1;
  /// Multiplies the analytic footprint ratio in the cross-engine check only.
  double gamma_scale = 1.0;
};

CheckResult check_telescoping();
CheckResult check_mminf_reduction();
std::vector<CheckResult> check_lambert_w();
CheckResult check_beam_area();
CheckResult check_closed_form_vs_series();
/// Cross-engine agreement for `sc` (replications and horizon raised to the
/// required minimums).
std::vector<CheckResult> check_cross_engine(const Scenario& sc, const ValidationOptions& opts = {});
std::vector<CheckResult> check_monotonicity();
std::vector<CheckResult> check_power_optimum();
CheckResult check_determinism(const Scenario& sc, const ValidationOptions& opts = {});

std::vector<CheckResult> run_validation(const Scenario& cross_engine, const ValidationOptions& opts = {});

/// Columns: check, description, measured, comparison, tolerance, seconds, time_limit_s, verdict, detail.
Table validation_table(const std::vector<CheckResult>& results);

}  // namespace dirnet
