#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairdiv/instance.hpp"

namespace fairdiv {

// Comparison slack used by every fairness predicate, guarding against
// summation-order rounding.
inline constexpr double kMetricSlack = 1e-12;

// All fairness/efficiency measurements for one (instance, allocation) pair.
// Envy uses the mode-appropriate sign: goods envy(i,k) = max{0, u_i(A_k) -
// u_i(A_i)}, chores envy(i,k) = max{0, d_i(A_i) - d_i(A_k)}.
struct MetricsReport {
  int n = 0;
  std::vector<double> envy;  // n x n, row-major, zero diagonal
  // max_i (1 + E_i / u_i(A_i)), goods only (absent for chores); +infinity
  // when an envious agent values its own bundle at 0.
  std::optional<double> worst_envy_ratio;
  double fraction_envious = 0.0;
  double social_welfare = 0.0;
  bool is_ef = false;
  bool is_prop = false;
  // Per-agent proportionality shortfall: how far the agent's own bundle falls
  // short of its 1/n fair share (mode-appropriate direction), clamped at 0.
  std::vector<double> prop_shortfalls;

  double envy_at(int i, int k) const {
    return envy[static_cast<std::size_t>(i) * n + k];
  }

  // Flat JSON object with fixed field names {worst_envy_ratio,
  // fraction_envious, social_welfare, is_ef, is_prop}. Infinity is encoded as
  // the string "inf"; a chores report encodes worst_envy_ratio as null.
  std::string to_json() const;
  static MetricsReport from_json(const std::string& text);

  bool operator==(const MetricsReport& other) const;
};

// Individual measurements (each recomputes from scratch; compute_metrics
// bundles them in one pass).
std::vector<double> envy_matrix(const Instance& instance, const Allocation& alloc);
double worst_envy_ratio(const Instance& instance, const Allocation& alloc);
double fraction_envious(const Instance& instance, const Allocation& alloc);
double social_welfare(const Instance& instance, const Allocation& alloc);

MetricsReport compute_metrics(const Instance& instance, const Allocation& alloc);

struct ApproxChecks {
  bool c_ef = false;
  bool c_msw = false;
};

// c-approximate envy-freeness and c-approximate maximum social welfare
// (goods; the welfare optimum is the argmax allocation by construction).
ApproxChecks approx_checks(const Instance& instance, const Allocation& alloc,
                           double c);

// social_welfare(sampled) / social_welfare(full) on one shared instance;
// 1.0 when both welfares are 0; +infinity in the degenerate case of a zero
// denominator with nonzero numerator.
double welfare_ratio(const Allocation& sampled, const Allocation& full,
                     const Instance& instance);

}  // namespace fairdiv
