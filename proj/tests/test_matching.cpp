#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fairdiv/instance.hpp"
#include "fairdiv/matching.hpp"
#include "fairdiv/oracle.hpp"
#include "fairdiv/rng.hpp"

using namespace fairdiv;

namespace {

Instance values_instance(std::vector<double> values, int n, int m) {
  std::vector<DistributionSpec> specs(static_cast<std::size_t>(m),
                                      DistributionSpec::uniform(0.0, 1.0));
  return Instance::from_parts(n, m, Mode::Goods, std::move(specs), std::move(values), 0);
}

}  // namespace

TEST_CASE("graph construction validates and normalizes") {
  CHECK_THROWS_AS(BipartiteGraph(2, 2, {{0}}), std::invalid_argument);
  CHECK_THROWS_AS(BipartiteGraph(1, 2, {{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(BipartiteGraph(1, 2, {{-1}}), std::invalid_argument);
  CHECK_THROWS_AS(BipartiteGraph(1, 2, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(BipartiteGraph(-1, 0, {}), std::invalid_argument);
  const BipartiteGraph g(1, 3, {{2, 0}});  // unsorted input is normalized
  CHECK(g.neighbors(0) == std::vector<int>{0, 2});
  CHECK(g.edge_count() == 2);
}

TEST_CASE("max matching on hand graphs") {
  const BipartiteGraph complete33(3, 3, {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}});
  CHECK(max_matching(complete33).cardinality() == 3);

  // Two lefts compete for the single right vertex 0.
  const BipartiteGraph bottleneck(2, 2, {{0}, {0}});
  const Matching m = max_matching(bottleneck);
  CHECK(m.cardinality() == 1);
  CHECK(m.right_to_left[1] == -1);

  const BipartiteGraph empty(2, 2, {{}, {}});
  CHECK(max_matching(empty).cardinality() == 0);

  // Needs an augmenting path: greedy 0->0 would block left 1.
  const BipartiteGraph augment(2, 2, {{0, 1}, {0}});
  CHECK(max_matching(augment).cardinality() == 2);
}

TEST_CASE("max matching agrees with the exhaustive oracle on random graphs") {
  SeededRng rng(0xBEEF);
  for (int t = 0; t < 200; ++t) {
    const int nl = 1 + static_cast<int>(rng.next_below(8));
    const int nr = 1 + static_cast<int>(rng.next_below(8));
    std::vector<double> probs(static_cast<std::size_t>(nr));
    for (double& p : probs) p = rng.next_double();
    const BipartiteGraph g = random_bipartite(nl, nr, probs, rng.next_u64());
    const Matching fast = max_matching(g);
    CHECK(fast.cardinality() == brute_max_matching(g));
    // Consistency of the reported matching itself.
    int degree_sum = 0;
    for (int d : fast.left_degree) {
      CHECK(d <= 1);
      degree_sum += d;
    }
    CHECK(degree_sum == fast.cardinality());
    for (int r = 0; r < nr; ++r) {
      const int l = fast.right_to_left[static_cast<std::size_t>(r)];
      if (l < 0) continue;
      const std::vector<int>& nbrs = g.neighbors(l);
      CHECK(std::find(nbrs.begin(), nbrs.end(), r) != nbrs.end());
    }
  }
}

TEST_CASE("max matching result is canonical") {
  SeededRng rng(0xCAFE);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> probs(6, 0.5);
    const BipartiteGraph g = random_bipartite(6, 6, probs, rng.next_u64());
    const Matching a = max_matching(g);
    const Matching b = max_matching(g);
    CHECK(a.right_to_left == b.right_to_left);
  }
}

TEST_CASE("perfect r-matching covers its three regimes") {
  // n_right == r * n_left: every left exactly r, every right matched.
  const BipartiteGraph complete24(2, 4, {{0, 1, 2, 3}, {0, 1, 2, 3}});
  const auto perfect = perfect_r_matching(complete24, 2);
  REQUIRE(perfect.has_value());
  CHECK(perfect->cardinality() == 4);
  CHECK(perfect->left_degree == std::vector<int>{2, 2});

  // n_right < r * n_left: all rights matched, left degrees <= r.
  const BipartiteGraph complete23(2, 3, {{0, 1, 2}, {0, 1, 2}});
  const auto under = perfect_r_matching(complete23, 2);
  REQUIRE(under.has_value());
  CHECK(under->cardinality() == 3);
  CHECK(under->left_degree[0] + under->left_degree[1] == 3);
  CHECK(under->left_degree[0] <= 2);
  CHECK(under->left_degree[1] <= 2);

  // n_right > r * n_left: every left exactly r, surplus rights unmatched.
  const BipartiteGraph complete15(1, 5, {{0, 1, 2, 3, 4}});
  const auto over = perfect_r_matching(complete15, 3);
  REQUIRE(over.has_value());
  CHECK(over->cardinality() == 3);
  CHECK(over->left_degree == std::vector<int>{3});

  // A left vertex that cannot fill its degree: nullopt.
  const BipartiteGraph starved(2, 4, {{0, 1, 2, 3}, {0}});
  CHECK(!perfect_r_matching(starved, 2).has_value());

  CHECK_THROWS_AS(perfect_r_matching(complete24, 0), std::invalid_argument);
}

TEST_CASE("right saturated matching") {
  // Rights {0,1} both coverable using distinct lefts.
  const BipartiteGraph ok(3, 2, {{0}, {0, 1}, {1}});
  const auto sat = right_saturated_matching(ok);
  REQUIRE(sat.has_value());
  CHECK(sat->cardinality() == 2);
  CHECK(sat->right_to_left[0] >= 0);
  CHECK(sat->right_to_left[1] >= 0);

  // Right vertex 1 has no neighbor at all.
  const BipartiteGraph missing(2, 2, {{0}, {0}});
  CHECK(!right_saturated_matching(missing).has_value());
}

TEST_CASE("right saturation is dual to Hall's condition on the right side") {
  // For every random graph, right_saturated succeeds iff the graph reversed
  // (rights become lefts) has no Hall violation.
  SeededRng rng(0xD00D);
  for (int t = 0; t < 100; ++t) {
    const int nl = 1 + static_cast<int>(rng.next_below(6));
    const int nr = 1 + static_cast<int>(rng.next_below(6));
    std::vector<double> probs(static_cast<std::size_t>(nr));
    for (double& p : probs) p = 0.3 + 0.4 * rng.next_double();
    const BipartiteGraph g = random_bipartite(nl, nr, probs, rng.next_u64());
    std::vector<std::vector<int>> reversed(static_cast<std::size_t>(nr));
    for (int l = 0; l < nl; ++l)
      for (int r : g.neighbors(l)) reversed[static_cast<std::size_t>(r)].push_back(l);
    const BipartiteGraph rg(nr, nl, std::move(reversed));
    const bool saturable = right_saturated_matching(g).has_value();
    const bool violated = hall_violation(rg, nr).has_value();
    CHECK(saturable == !violated);
  }
}

TEST_CASE("threshold graph edges follow the direction") {
  const Instance inst = values_instance({0.9, 0.2, 0.5, 0.4, 0.8, 0.5}, 2, 3);
  const BipartiteGraph ge =
      threshold_graph(inst, {0, 1, 2}, {0.5, 0.5, 0.5}, ThresholdDirection::AtLeast);
  CHECK(ge.neighbors(0) == std::vector<int>{0, 2});  // 0.9, 0.5 pass; 0.2 fails
  CHECK(ge.neighbors(1) == std::vector<int>{1, 2});  // 0.8, 0.5 pass; 0.4 fails
  const BipartiteGraph le =
      threshold_graph(inst, {0, 1, 2}, {0.5, 0.5, 0.5}, ThresholdDirection::AtMost);
  CHECK(le.neighbors(0) == std::vector<int>{1, 2});
  CHECK(le.neighbors(1) == std::vector<int>{0, 2});

  // Subset of items: right indices are positions within `items`.
  const BipartiteGraph sub =
      threshold_graph(inst, {2, 0}, {0.6, 0.6}, ThresholdDirection::AtLeast);
  CHECK(sub.neighbors(0) == std::vector<int>{1});  // item 0 (=0.9) sits at idx 1
  CHECK(sub.neighbors(1) == std::vector<int>{});

  CHECK_THROWS_AS(threshold_graph(inst, {0, 1}, {0.5}, ThresholdDirection::AtLeast),
                  std::invalid_argument);
}

TEST_CASE("hall violation finds the minimal witness") {
  // Lefts {0,1} both map only to right 0: S = {0,1} has 1 < 2 neighbors.
  const BipartiteGraph bad(3, 3, {{0}, {0}, {0, 1, 2}});
  const auto witness = hall_violation(bad, 3);
  REQUIRE(witness.has_value());
  CHECK(*witness == std::vector<int>{0, 1});

  // Isolated left vertex: singleton violation.
  const BipartiteGraph isolated(2, 2, {{}, {0, 1}});
  const auto single = hall_violation(isolated, 2);
  REQUIRE(single.has_value());
  CHECK(*single == std::vector<int>{0});

  const BipartiteGraph fine(2, 2, {{0, 1}, {0, 1}});
  CHECK(!hall_violation(fine, 2).has_value());

  CHECK_THROWS_AS(hall_violation(fine, 0), std::invalid_argument);
  CHECK_THROWS_AS(hall_violation(fine, 21), std::invalid_argument);
  const BipartiteGraph wide(21, 1, std::vector<std::vector<int>>(21));
  CHECK_THROWS_AS(hall_violation(wide, 2), std::invalid_argument);
}

TEST_CASE("random bipartite graphs") {
  const BipartiteGraph full = random_bipartite(3, 4, {1.0, 1.0, 1.0, 1.0}, 9);
  for (int l = 0; l < 3; ++l) CHECK(full.neighbors(l) == std::vector<int>{0, 1, 2, 3});
  const BipartiteGraph none = random_bipartite(3, 4, {0.0, 0.0, 0.0, 0.0}, 9);
  CHECK(none.edge_count() == 0);

  // Determinism per seed.
  const BipartiteGraph a = random_bipartite(5, 5, {0.5, 0.5, 0.5, 0.5, 0.5}, 77);
  const BipartiteGraph b = random_bipartite(5, 5, {0.5, 0.5, 0.5, 0.5, 0.5}, 77);
  for (int l = 0; l < 5; ++l) CHECK(a.neighbors(l) == b.neighbors(l));

  // Per-right-vertex probabilities actually differ by column.
  int col0 = 0, col1 = 0;
  for (int t = 0; t < 200; ++t) {
    const BipartiteGraph g =
        random_bipartite(1, 2, {0.9, 0.1}, 1000 + static_cast<std::uint64_t>(t));
    for (int r : g.neighbors(0)) (r == 0 ? col0 : col1)++;
  }
  CHECK(col0 > 150);
  CHECK(col1 < 50);

  CHECK_THROWS_AS(random_bipartite(2, 3, {0.5, 0.5}, 0), std::invalid_argument);
  CHECK_THROWS_AS(random_bipartite(2, 1, {1.5}, 0), std::invalid_argument);
}

TEST_CASE("dense random graphs above the connectivity threshold almost always match") {
  // Statistical sanity anchor: p = 3 ln n / n keeps perfect matchings common.
  const int n = 120;
  const double p = 3.0 * std::log(static_cast<double>(n)) / n;
  int successes = 0;
  for (int t = 0; t < 40; ++t) {
    const BipartiteGraph g = random_bipartite(
        n, n, std::vector<double>(static_cast<std::size_t>(n), p),
        mix_seed(0xAB, static_cast<std::uint64_t>(t)));
    successes += perfect_r_matching(g, 1).has_value();
  }
  CHECK(successes >= 36);
}
