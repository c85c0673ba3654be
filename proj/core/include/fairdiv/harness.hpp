#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairdiv/distributions.hpp"
#include "fairdiv/instance.hpp"
#include "fairdiv/metrics.hpp"

namespace fairdiv {

// Declarative description of an experiment sweep: which algorithms to run on
// which instance sizes, with how many seeded trials, and where to cache the
// per-trial results.
struct ExperimentConfig {
  int n = 0;
  std::vector<int> m_values;
  Mode mode = Mode::Goods;
  FamilyMixture mixture = FamilyMixture::preset(FamilyMixture::Name::BetaUniform);
  std::vector<std::string> algorithms;   // subset of the names below
  std::vector<int> s_values;             // sampling only
  int trials = 10;
  std::uint64_t base_seed = 0;
  std::optional<double> c;               // prop_linear only
  std::string output_dir;

  // Throws std::invalid_argument naming the first offending field.
  void validate() const;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
};

inline constexpr const char* kAlgorithmNames[] = {
    "argmax", "sampling", "ef_small", "prop_two_stage", "prop_linear",
    "chores_ef_small"};

struct TrialKey {
  int n = 0;
  int m = 0;
  std::optional<int> s;   // sampling only
  std::string mixture;
  std::string algorithm;
  int trial = 0;

  // Cache file path relative to the output directory:
  // <mixture>/<algorithm>/n<n>_m<m>_s<s|na>_t<trial>.json
  std::string relative_path() const;

  bool operator==(const TrialKey&) const = default;
};

struct TrialResult {
  TrialKey key;
  bool success = true;
  std::optional<std::string> failed_stage;     // set iff !success
  std::optional<MetricsReport> metrics;        // set iff success
  std::optional<double> welfare_ratio;         // sampling successes only
  double wall_time_ms = 0.0;

  std::string to_json() const;
  static TrialResult from_json(const std::string& text);
};

struct RunStats {
  long long executed = 0;     // trial results computed fresh
  long long cache_hits = 0;   // trial results loaded from cache
};

// Runs every (m, algorithm, s, trial) cell of the config, loading cached
// results where present and caching fresh ones. Results come back in
// deterministic order: m_values order, then trial, then the config's
// algorithm order (s_values order within sampling). `jobs` > 1 spreads the
// (m, trial) groups over that many threads; the result order is unchanged.
std::vector<TrialResult> run(const ExperimentConfig& config,
                             RunStats* stats = nullptr, int jobs = 1);

// One aggregated CSV row: the mean/stddev of `metric` over a
// (algorithm, s, m) group. `trials` is the number of values aggregated.
struct PlotRow {
  int m = 0;
  std::string algorithm;
  std::optional<int> s;
  double mean = 0.0;
  double stddev = 0.0;
  int trials = 0;
};

// Aggregates results by (algorithm, s, m), sorted by that key with absent s
// first. Metrics: worst_envy_ratio, fraction_envious, welfare_ratio,
// social_welfare (means over successful trials only) and success_rate (over
// all trials). Sample standard deviation (N-1 denominator; 0 when N <= 1).
std::vector<PlotRow> aggregate_plot_rows(const std::vector<TrialResult>& results,
                                         const std::string& metric);

// Writes the aggregate rows as CSV with header "m,algorithm,s,mean,stddev,
// trials". Numbers use %.17g so reruns are byte-identical; infinities print
// as "inf".
void emit_plot_data(const std::vector<TrialResult>& results,
                    const std::string& metric, const std::string& path);

}  // namespace fairdiv
