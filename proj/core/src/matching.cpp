#include "fairdiv/matching.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace fairdiv {
namespace {

constexpr int kUnmatched = -1;
constexpr int kInfDist = std::numeric_limits<int>::max();

// Hopcroft-Karp over an implicit left vertex set. AdjFn maps a left vertex to
// its (sorted) neighbor list; this lets the cloning reduction share one
// adjacency list across all r clones of a left vertex.
template <typename AdjFn>
std::pair<std::vector<int>, std::vector<int>> hopcroft_karp(int n_left,
                                                            int n_right,
                                                            AdjFn&& adj) {
  std::vector<int> match_left(static_cast<std::size_t>(n_left), kUnmatched);
  std::vector<int> match_right(static_cast<std::size_t>(n_right), kUnmatched);
  std::vector<int> dist(static_cast<std::size_t>(n_left), 0);
  std::vector<int> bfs_queue;
  bfs_queue.reserve(static_cast<std::size_t>(n_left));

  auto bfs = [&]() -> bool {
    bfs_queue.clear();
    for (int l = 0; l < n_left; ++l) {
      if (match_left[static_cast<std::size_t>(l)] == kUnmatched) {
        dist[static_cast<std::size_t>(l)] = 0;
        bfs_queue.push_back(l);
      } else {
        dist[static_cast<std::size_t>(l)] = kInfDist;
      }
    }
    bool found_free_right = false;
    for (std::size_t head = 0; head < bfs_queue.size(); ++head) {
      const int l = bfs_queue[head];
      for (int r : adj(l)) {
        const int l2 = match_right[static_cast<std::size_t>(r)];
        if (l2 == kUnmatched) {
          found_free_right = true;
        } else if (dist[static_cast<std::size_t>(l2)] == kInfDist) {
          dist[static_cast<std::size_t>(l2)] = dist[static_cast<std::size_t>(l)] + 1;
          bfs_queue.push_back(l2);
        }
      }
    }
    return found_free_right;
  };

  // Iterative DFS along the BFS layering (recursion would overflow on long
  // augmenting paths in the cloned graphs).
  std::vector<std::size_t> edge_pos(static_cast<std::size_t>(n_left));
  std::vector<int> stack;
  auto try_augment = [&](int root) -> bool {
    stack.clear();
    stack.push_back(root);
    edge_pos[static_cast<std::size_t>(root)] = 0;
    while (!stack.empty()) {
      const int l = stack.back();
      const auto& nbrs = adj(l);
      bool advanced = false;
      while (edge_pos[static_cast<std::size_t>(l)] < nbrs.size()) {
        const int r = nbrs[edge_pos[static_cast<std::size_t>(l)]++];
        const int l2 = match_right[static_cast<std::size_t>(r)];
        if (l2 == kUnmatched) {
          // Unwind the whole augmenting path that the stack encodes.
          int right = r;
          for (std::size_t k = stack.size(); k-- > 0;) {
            const int left = stack[k];
            const int prev = match_left[static_cast<std::size_t>(left)];
            match_left[static_cast<std::size_t>(left)] = right;
            match_right[static_cast<std::size_t>(right)] = left;
            right = prev;
          }
          return true;
        }
        if (dist[static_cast<std::size_t>(l2)] ==
            dist[static_cast<std::size_t>(l)] + 1) {
          edge_pos[static_cast<std::size_t>(l2)] = 0;
          stack.push_back(l2);
          advanced = true;
          break;
        }
      }
      if (!advanced) {
        dist[static_cast<std::size_t>(l)] = kInfDist;  // dead end in this phase
        stack.pop_back();
      }
    }
    return false;
  };

  while (bfs()) {
    for (int l = 0; l < n_left; ++l)
      if (match_left[static_cast<std::size_t>(l)] == kUnmatched) try_augment(l);
  }
  return {std::move(match_left), std::move(match_right)};
}

}  // namespace

BipartiteGraph::BipartiteGraph(int n_left, int n_right,
                               std::vector<std::vector<int>> adjacency)
    : n_left_(n_left), n_right_(n_right), adjacency_(std::move(adjacency)) {
  if (n_left_ < 0 || n_right_ < 0)
    throw std::invalid_argument("BipartiteGraph: negative vertex count");
  if (adjacency_.size() != static_cast<std::size_t>(n_left_))
    throw std::invalid_argument("BipartiteGraph: adjacency size != n_left");
  for (auto& nbrs : adjacency_) {
    if (!std::is_sorted(nbrs.begin(), nbrs.end())) std::sort(nbrs.begin(), nbrs.end());
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (nbrs[k] < 0 || nbrs[k] >= n_right_)
        throw std::invalid_argument("BipartiteGraph: neighbor index out of range");
      if (k > 0 && nbrs[k] == nbrs[k - 1])
        throw std::invalid_argument("BipartiteGraph: duplicate edge");
    }
    edge_count_ += nbrs.size();
  }
}

Matching max_matching(const BipartiteGraph& g) {
  auto [match_left, match_right] = hopcroft_karp(
      g.n_left(), g.n_right(),
      [&g](int l) -> const std::vector<int>& { return g.neighbors(l); });
  Matching m;
  m.right_to_left = std::move(match_right);
  m.left_degree.assign(static_cast<std::size_t>(g.n_left()), 0);
  for (int l = 0; l < g.n_left(); ++l)
    if (match_left[static_cast<std::size_t>(l)] != kUnmatched)
      m.left_degree[static_cast<std::size_t>(l)] = 1;
  return m;
}

std::optional<Matching> perfect_r_matching(const BipartiteGraph& g, int r) {
  if (r < 1) throw std::invalid_argument("perfect_r_matching: r must be >= 1");
  const long long clones = static_cast<long long>(g.n_left()) * r;
  if (clones > 100'000'000LL)
    throw std::invalid_argument("perfect_r_matching: cloned graph too large");
  const long long target = std::min<long long>(clones, g.n_right());
  auto [match_left, match_right] = hopcroft_karp(
      static_cast<int>(clones), g.n_right(),
      [&g, r](int clone) -> const std::vector<int>& {
        return g.neighbors(clone / r);
      });
  long long cardinality = 0;
  for (int l2 : match_right) cardinality += (l2 != kUnmatched);
  if (cardinality < target) return std::nullopt;
  Matching m;
  m.right_to_left.assign(static_cast<std::size_t>(g.n_right()), kUnmatched);
  m.left_degree.assign(static_cast<std::size_t>(g.n_left()), 0);
  for (int right = 0; right < g.n_right(); ++right) {
    const int clone = match_right[static_cast<std::size_t>(right)];
    if (clone == kUnmatched) continue;
    const int left = clone / r;
    m.right_to_left[static_cast<std::size_t>(right)] = left;
    ++m.left_degree[static_cast<std::size_t>(left)];
  }
  return m;
}

std::optional<Matching> right_saturated_matching(const BipartiteGraph& g) {
  Matching m = max_matching(g);
  if (m.cardinality() < g.n_right()) return std::nullopt;
  return m;
}

BipartiteGraph threshold_graph(const Instance& instance,
                               const std::vector<int>& items,
                               const std::vector<double>& thresholds,
                               ThresholdDirection direction) {
  if (items.size() != thresholds.size())
    throw std::invalid_argument("threshold_graph: one threshold per item required");
  const int n = instance.n();
  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (std::size_t idx = 0; idx < items.size(); ++idx) {
      const double v = instance.value(i, items[idx]);
      const bool edge = direction == ThresholdDirection::AtLeast
                            ? v >= thresholds[idx]
                            : v <= thresholds[idx];
      if (edge) adjacency[static_cast<std::size_t>(i)].push_back(static_cast<int>(idx));
    }
  }
  return BipartiteGraph(n, static_cast<int>(items.size()), std::move(adjacency));
}

namespace {

// Depth-first enumeration of left subsets of size <= cap, maintaining the
// distinct-neighbor count incrementally.
struct HallSearch {
  const BipartiteGraph& g;
  int cap;
  std::vector<int> cover_count;
  std::vector<int> chosen;
  int distinct = 0;

  explicit HallSearch(const BipartiteGraph& graph, int max_subset)
      : g(graph), cap(max_subset),
        cover_count(static_cast<std::size_t>(graph.n_right()), 0) {}

  std::optional<std::vector<int>> search(int next) {
    if (!chosen.empty() && distinct < static_cast<int>(chosen.size())) return chosen;
    if (static_cast<int>(chosen.size()) == cap || next == g.n_left())
      return std::nullopt;
    for (int v = next; v < g.n_left(); ++v) {
      chosen.push_back(v);
      for (int r : g.neighbors(v))
        if (cover_count[static_cast<std::size_t>(r)]++ == 0) ++distinct;
      if (auto w = search(v + 1)) return w;
      for (int r : g.neighbors(v))
        if (--cover_count[static_cast<std::size_t>(r)] == 0) --distinct;
      chosen.pop_back();
    }
    return std::nullopt;
  }
};

}  // namespace

std::optional<std::vector<int>> hall_violation(const BipartiteGraph& g,
                                               int max_subset) {
  if (max_subset < 1 || max_subset > 20)
    throw std::invalid_argument("hall_violation: max_subset must be in [1, 20]");
  if (g.n_left() > 20)
    throw std::invalid_argument(
        "hall_violation: exhaustive search is limited to n_left <= 20");
  HallSearch s(g, std::min(max_subset, g.n_left()));
  return s.search(0);
}

BipartiteGraph random_bipartite(int n_left, int n_right,
                                const std::vector<double>& edge_probs,
                                std::uint64_t seed) {
  if (edge_probs.size() != static_cast<std::size_t>(n_right))
    throw std::invalid_argument("random_bipartite: need one probability per right vertex");
  for (double p : edge_probs)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("random_bipartite: probabilities must lie in [0,1]");
  SeededRng rng(seed);
  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(n_left));
  for (int l = 0; l < n_left; ++l)
    for (int r = 0; r < n_right; ++r)
      if (rng.next_double() < edge_probs[static_cast<std::size_t>(r)])
        adjacency[static_cast<std::size_t>(l)].push_back(r);
  return BipartiteGraph(n_left, n_right, std::move(adjacency));
}

}  // namespace fairdiv
