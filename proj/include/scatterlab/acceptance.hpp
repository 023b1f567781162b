#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "scatterlab/io.hpp"

namespace scatterlab {

inline constexpr int kCriterionCount = 9;

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  int workers = 1;
  // Called after each criterion finishes; timings never enter the report.
  std::function<void(int id, bool passed, double seconds)> progress;
};

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
  bool required = true;  // informational checks do not decide the criterion
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  Json details = Json::object();
  std::string error;  // set when the run threw
  double seconds = 0.0;
  double time_limit = 0.0;  // 0: none

  bool checks_passed() const;
  bool within_time() const { return time_limit <= 0.0 || seconds <= time_limit; }
  bool passed() const { return checks_passed() && within_time(); }
};

const char* criterion_title(int id);

CriterionResult run_criterion(int id, const AcceptanceOptions& options);

// Criterion 9 reruns 1-8 at a second worker count; when 1-8 are part of `ids` their results
// are reused as the first run.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& options);

// Deterministic report: no timings.
Json acceptance_report(const std::vector<CriterionResult>& results, const AcceptanceOptions& options);
std::string summary_line(const CriterionResult& result);

}  // namespace scatterlab
