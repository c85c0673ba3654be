#pragma once

#include <cstdint>
#include <vector>

#include "fairdiv/instance.hpp"
#include "fairdiv/matching.hpp"

namespace fairdiv {

// Result of enumerating every one of the n^m allocations of an instance.
struct ExhaustiveReport {
  bool ef_exists = false;
  bool prop_exists = false;
  double msw_value = 0.0;
  std::vector<int> msw_allocation;   // owner per item, the first optimum in
                                     // lexicographic owner order
  std::uint64_t allocations_scanned = 0;
};

// Scans all n^m allocations; throws std::invalid_argument when n^m exceeds
// 1e7 (use only on tiny instances). For goods MSW is the maximum welfare,
// for chores the minimum total disutility.
ExhaustiveReport exhaustive_scan(const Instance& instance);

// Maximum-matching cardinality by trying every subset assignment; only for
// graphs with n_left <= 8 (and n_right <= 64). Independent of the
// augmenting-path implementation, for cross-checking.
int brute_max_matching(const BipartiteGraph& g);

// Fraction of `trials` random bipartite graphs (uniform edge probability p)
// that admit a perfect matching when n_left == n_right, or a right-saturated
// matching otherwise. Trial t uses seed mix_seed(seed, t).
double matching_rate(int n_left, int n_right, double p, int trials,
                     std::uint64_t seed);

}  // namespace fairdiv
