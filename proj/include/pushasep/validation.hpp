#pragma once

#include <string>
#include <vector>

namespace pushasep {

struct CriterionResult {
  std::string id;     // "AC-1" .. "AC-13"
  std::string title;
  bool pass = false;
  double metric = 0.0;     // worst observed deviation (criterion specific)
  double tolerance = 0.0;  // threshold the metric is compared against
  std::string detail;
  double seconds = 0.0;
};

// Identifiers of the acceptance criteria in order.
std::vector<std::string> criterion_ids();

// Runs one criterion. Numerical exceptions are caught and reported as a
// failure with the message in `detail`; unknown ids throw ConfigError.
CriterionResult run_criterion(const std::string& id);

// Runs the listed criteria (all when empty) for the given profile. Only the
// "desk" profile exists.
std::vector<CriterionResult> run_acceptance(const std::string& profile,
                                            const std::vector<std::string>& ids = {});

// "AC-n PASS|FAIL metric=... tol=... (s) detail".
std::string format_result(const CriterionResult& r);

}  // namespace pushasep
