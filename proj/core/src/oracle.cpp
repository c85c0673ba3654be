#include "fairdiv/oracle.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

#include "fairdiv/metrics.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

namespace {

constexpr std::uint64_t kScanCap = 10'000'000;

// n^m with overflow detection against the cap.
std::uint64_t checked_power(int n, int m) {
  std::uint64_t total = 1;
  for (int j = 0; j < m; ++j) {
    if (total > kScanCap / static_cast<std::uint64_t>(n) + 1) return kScanCap + 1;
    total *= static_cast<std::uint64_t>(n);
    if (total > kScanCap) return kScanCap + 1;
  }
  return total;
}

}  // namespace

ExhaustiveReport exhaustive_scan(const Instance& instance) {
  const int n = instance.n();
  const int m = instance.m();
  const std::uint64_t total = checked_power(n, m);
  if (total > kScanCap)
    throw std::invalid_argument("exhaustive_scan: n^m exceeds " +
                                std::to_string(kScanCap));

  const bool maximize = instance.mode() == Mode::Goods;
  ExhaustiveReport report;
  report.allocations_scanned = total;

  // Odometer over owner vectors, item 0 the most significant digit, so the
  // scan order is lexicographic and the retained optimum is the first one.
  std::vector<int> owner(static_cast<std::size_t>(m), 0);
  bool have_best = false;
  std::vector<double> bundle(static_cast<std::size_t>(n));
  for (std::uint64_t step = 0; step < total; ++step) {
    // Recompute per-agent bundle values from scratch each state: slower than
    // incremental updates but immune to accumulation drift, and tiny anyway.
    std::fill(bundle.begin(), bundle.end(), 0.0);
    for (int j = 0; j < m; ++j)
      bundle[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)])] +=
          instance.value(owner[static_cast<std::size_t>(j)], j);

    // Welfare for the running optimum is summed in item order, not grouped by
    // agent: the sum is then identical across allocations that differ only in
    // how tied items are split, so with strict improvement the retained
    // optimum is the lexicographically first one (per item, the lowest-index
    // best agent).
    double welfare = 0.0;
    for (int j = 0; j < m; ++j)
      welfare += instance.value(owner[static_cast<std::size_t>(j)], j);

    if (!have_best || (maximize ? welfare > report.msw_value
                                : welfare < report.msw_value)) {
      have_best = true;
      report.msw_value = welfare;
      report.msw_allocation = owner;
    }

    if (!report.ef_exists || !report.prop_exists) {
      bool ef = true;
      for (int i = 0; i < n && ef; ++i) {
        for (int k = 0; k < n && ef; ++k) {
          if (i == k) continue;
          double other = 0.0;
          for (int j = 0; j < m; ++j)
            if (owner[static_cast<std::size_t>(j)] == k)
              other += instance.value(i, j);
          const double gap = maximize
                                 ? other - bundle[static_cast<std::size_t>(i)]
                                 : bundle[static_cast<std::size_t>(i)] - other;
          if (gap > kMetricSlack) ef = false;
        }
      }
      if (ef) report.ef_exists = true;

      bool prop = true;
      for (int i = 0; i < n && prop; ++i) {
        const double share = instance.row_total(i) / n;
        const double gap = maximize
                               ? share - bundle[static_cast<std::size_t>(i)]
                               : bundle[static_cast<std::size_t>(i)] - share;
        if (gap > kMetricSlack) prop = false;
      }
      if (prop) report.prop_exists = true;
    }

    // Advance the odometer (least significant digit is the last item).
    for (int j = m - 1; j >= 0; --j) {
      if (++owner[static_cast<std::size_t>(j)] < n) break;
      owner[static_cast<std::size_t>(j)] = 0;
    }
  }

  // Report the optimum welfare through the same summation the metrics use,
  // so the two agree bit for bit.
  report.msw_value = social_welfare(
      instance, Allocation(n, report.msw_allocation,
                           Allocation::Provenance::External));
  return report;
}

namespace {

int brute_match_recurse(const BipartiteGraph& g, int left,
                        std::uint64_t used_right) {
  if (left == g.n_left()) return 0;
  // Option 1: leave this left vertex unmatched.
  int best = brute_match_recurse(g, left + 1, used_right);
  for (int right : g.neighbors(left)) {
    const std::uint64_t bit = std::uint64_t{1} << right;
    if (used_right & bit) continue;
    const int with = 1 + brute_match_recurse(g, left + 1, used_right | bit);
    if (with > best) best = with;
  }
  return best;
}

}  // namespace

int brute_max_matching(const BipartiteGraph& g) {
  if (g.n_left() > 8)
    throw std::invalid_argument("brute_max_matching: n_left must be <= 8");
  if (g.n_right() > 64)
    throw std::invalid_argument("brute_max_matching: n_right must be <= 64");
  return brute_match_recurse(g, 0, 0);
}

double matching_rate(int n_left, int n_right, double p, int trials,
                     std::uint64_t seed) {
  if (trials <= 0) throw std::invalid_argument("matching_rate: trials must be positive");
  const std::vector<double> probs(static_cast<std::size_t>(n_right), p);
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    const BipartiteGraph g = random_bipartite(
        n_left, n_right, probs, mix_seed(seed, static_cast<std::uint64_t>(t)));
    if (n_left == n_right) {
      if (perfect_r_matching(g, 1)) ++hits;
    } else {
      if (right_saturated_matching(g)) ++hits;
    }
  }
  return static_cast<double>(hits) / trials;
}

}  // namespace fairdiv
