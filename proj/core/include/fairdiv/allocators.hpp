#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "fairdiv/instance.hpp"
#include "fairdiv/matching.hpp"

namespace fairdiv {

// Per-item acceptance thresholds plus the minimum density lower bound they
// were derived from. tau[j] follows the invoking algorithm's formula exactly
// and is never clamped (a negative tau merely densifies the graph).
struct Thresholds {
  std::vector<double> tau;
  double alpha_min = 0.0;
};

// Which matching stage an allocator failed in. Infeasibility is a
// first-class result, never a fallback: the harness measures failure rates.
enum class FailStage {
  Stage1,                  // two-stage proportional, first matching
  Stage2,                  // two-stage proportional, fix matching
  PerfectXMatching,        // envy-free small-goods matching
  LeftSaturatedXMatching,  // proportional linear-regime matching
  Phase1,                  // chores, matching on the first x*n chores
  Phase2,                  // chores, matching on the remaining chores
};

std::string_view fail_stage_str(FailStage stage);
FailStage parse_fail_stage(std::string_view text);

struct AllocOutcome {
  std::optional<Allocation> allocation;
  std::optional<FailStage> failed_stage;

  bool success() const { return allocation.has_value(); }

  static AllocOutcome ok(Allocation alloc) {
    return {std::move(alloc), std::nullopt};
  }
  static AllocOutcome infeasible(FailStage stage) { return {std::nullopt, stage}; }
};

// Each item to the agent valuing it most (goods) or least (chores); ties
// break to the lowest agent index. Maximum social welfare by construction.
Allocation allocate_argmax(const Instance& instance);

enum class SampleRegime { Discrete, ContinuousConstant, ContinuousBoundedMean };

// Sample-size formulas (natural log), rounded up:
//   Discrete:             2 ln(m) / alpha_min
//   ContinuousConstant:  20 ln(m) / alpha_min
//   ContinuousBoundedMean: 2 ln(m)^2 / alpha_min
// The result may exceed the agent count; callers clamp to n.
int sample_size(SampleRegime regime, int m, double alpha_min);

// Which agents were sampled per item, who won, and at what value.
struct SampleLog {
  std::vector<std::vector<int>> sampled;  // per item, in draw order
  std::vector<int> winner;
  std::vector<double> winning_value;
};

// Online sampling allocator (goods): items are processed in index order; for
// each item s agents are drawn uniformly without replacement and the item
// goes to the sampled agent with the highest value (ties to lowest index).
// Reads only the sampled matrix entries; when access_log is non-null every
// (agent, item) read is appended to it (m*s entries total).
std::pair<Allocation, SampleLog> allocate_sampling(
    const Instance& instance, int s, std::uint64_t seed,
    std::vector<std::pair<int, int>>* access_log = nullptr);

// tau_j = 1 - 1.1 ln(n) / (alpha_j n) per item. Errors if any item's density
// lower bound alpha_j is zero (the formula would divide by it), naming the
// offending item.
Thresholds goods_thresholds(const Instance& instance);

// Envy-free allocator for the small-goods regime (m divisible by n): builds
// the full threshold graph and finds a perfect (m/n)-matching, so every agent
// receives exactly m/n goods, each valued at or above its threshold.
AllocOutcome allocate_ef_small(const Instance& instance);

// Two-stage proportional allocator for n <= m <= 2n: a perfect matching on
// the first n goods at the tau thresholds, then a fix matching that tops up
// every agent still below its proportional share u_i(M)/n. Goods left over
// after both stages go to agent 0 (extra goods cannot break proportionality).
AllocOutcome allocate_prop_two_stage(const Instance& instance);

// r = ceil(2 (3+c) / (1-c)) for the linear-regime proportional allocator.
int prop_linear_r(double c);

// Proportional allocator for the linear regime: requires all item means <= c
// and m >= r*n. Gives each agent exactly x = floor(m/n) goods via the cloned
// threshold matching; the y = m - x*n leftover goods are handed out
// round-robin starting at agent 0.
AllocOutcome allocate_prop_linear(const Instance& instance, double c);

// Envy-free chores allocator: phase 1 assigns the first x*n chores (x =
// floor(m/n)) through a perfect x-matching at tau_j = 1.1 ln(n) / (alpha_j n);
// phase 2 right-saturates the remaining y chores at the uniform threshold
// 1.1 ln(n) / (alpha_min n), so each goes to a distinct agent.
AllocOutcome allocate_ef_small_chores(const Instance& instance);

}  // namespace fairdiv
