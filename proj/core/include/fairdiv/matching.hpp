#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fairdiv/instance.hpp"

namespace fairdiv {

// Immutable bipartite graph; adjacency is per-left-vertex, sorted ascending.
class BipartiteGraph {
 public:
  BipartiteGraph(int n_left, int n_right, std::vector<std::vector<int>> adjacency);

  int n_left() const { return n_left_; }
  int n_right() const { return n_right_; }
  const std::vector<int>& neighbors(int left) const {
    return adjacency_[static_cast<std::size_t>(left)];
  }
  std::size_t edge_count() const { return edge_count_; }

 private:
  int n_left_ = 0;
  int n_right_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<std::vector<int>> adjacency_;
};

// An r-matching: every right vertex matched at most once; left degrees kept
// so degree-constrained callers can verify their bound.
struct Matching {
  std::vector<int> right_to_left;  // -1 when unmatched
  std::vector<int> left_degree;

  int cardinality() const {
    int c = 0;
    for (int l : right_to_left) c += (l >= 0);
    return c;
  }
};

// Maximum-cardinality matching via Hopcroft-Karp layered augmentation,
// O(E sqrt(V)). Left vertices and adjacency lists are visited in ascending
// index order, which pins a canonical result for reproducibility.
Matching max_matching(const BipartiteGraph& g);

// Degree-r matching through the cloning reduction: each left vertex becomes r
// clones and a maximum matching is computed on the cloned graph. Success
// means cardinality == min(r * n_left, n_right), covering the three uses:
//   - n_right == r * n_left: perfect r-matching (all right matched, every
//     left degree exactly r);
//   - n_right  < r * n_left: all right vertices matched, left degrees <= r;
//   - n_right  > r * n_left: every left degree exactly r, the surplus right
//     vertices stay unmatched (the caller distributes them separately).
// Returns std::nullopt when the bound is not attained.
std::optional<Matching> perfect_r_matching(const BipartiteGraph& g, int r);

// Matching that covers every right vertex (left degrees <= 1), i.e. a maximum
// matching of cardinality n_right; std::nullopt when none exists.
std::optional<Matching> right_saturated_matching(const BipartiteGraph& g);

enum class ThresholdDirection { AtLeast, AtMost };

// Agent-item comparison graph: left = agents, right = the given item subset,
// edge (i, idx) iff value(i, items[idx]) >= thresholds[idx] (AtLeast) or
// <= (AtMost).
BipartiteGraph threshold_graph(const Instance& instance,
                               const std::vector<int>& items,
                               const std::vector<double>& thresholds,
                               ThresholdDirection direction);

// Exhaustive search for a Hall violation: a left subset S with fewer than |S|
// distinct neighbors, |S| <= max_subset. Test-only; enforces max_subset <= 20
// and n_left <= 20. Returns the witness (ascending) or std::nullopt.
std::optional<std::vector<int>> hall_violation(const BipartiteGraph& g,
                                               int max_subset);

// Random bipartite graph: edge (l, r) present independently with probability
// edge_probs[r]; deterministic per seed (row-major edge stream).
BipartiteGraph random_bipartite(int n_left, int n_right,
                                const std::vector<double>& edge_probs,
                                std::uint64_t seed);

}  // namespace fairdiv
