#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace pamlab::acceptance {

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::string measured;
  std::string tolerance;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct AcceptanceOptions {
  bool full = false;
  /// Constant under test in A3 (injectable for the mutation check).
  std::function<double(double)> one_dim_constant;
  /// Criteria to run ("A1".."A10"); empty means all.
  std::vector<std::string> only;
};

/// Runs the selected criteria.  Failures, including exceptions, are reported
/// as FAIL lines; nothing is thrown.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);
CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& options);

/// One line per criterion: "<id> PASS|FAIL <title> | measured | tolerance | time".
void print_report(std::ostream& os, const std::vector<CriterionResult>& results);
bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace pamlab::acceptance
