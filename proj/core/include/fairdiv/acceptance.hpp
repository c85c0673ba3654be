#pragma once

#include <string>
#include <vector>

namespace fairdiv {

// Outcome of one end-to-end acceptance check. `detail` carries the measured
// quantities so a failure is diagnosable from the log alone.
struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the full acceptance suite. `scratch_dir` is wiped and used for the
// harness-backed checks (result caches, CSV files). Thresholds, seeds, and
// time limits are pinned inside; the function never throws for a failed
// check, only for environmental problems (e.g. unwritable scratch_dir).
std::vector<CriterionResult> run_acceptance(const std::string& scratch_dir);

}  // namespace fairdiv
