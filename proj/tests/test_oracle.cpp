#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fairdiv/allocators.hpp"
#include "fairdiv/instance.hpp"
#include "fairdiv/matching.hpp"
#include "fairdiv/metrics.hpp"
#include "fairdiv/oracle.hpp"
#include "fairdiv/rng.hpp"

using namespace fairdiv;

namespace {

Instance crafted(std::vector<double> values, int n, int m, Mode mode = Mode::Goods) {
  std::vector<DistributionSpec> specs(static_cast<std::size_t>(m),
                                      DistributionSpec::uniform(0.0, 1.0));
  return Instance::from_parts(n, m, mode, std::move(specs), std::move(values), 0);
}

}  // namespace

TEST_CASE("single agent trivially gets everything") {
  const Instance inst = crafted({0.3, 0.8}, 1, 2);
  const ExhaustiveReport rep = exhaustive_scan(inst);
  CHECK(rep.ef_exists);
  CHECK(rep.prop_exists);
  CHECK(rep.allocations_scanned == 1);
  CHECK(rep.msw_allocation == std::vector<int>{0, 0});
  CHECK(rep.msw_value == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("a single contested good admits neither EF nor PROP") {
  const Instance inst = crafted({0.1, 1.0}, 2, 1);
  const ExhaustiveReport rep = exhaustive_scan(inst);
  CHECK(!rep.ef_exists);
  CHECK(!rep.prop_exists);
  CHECK(rep.msw_value == 1.0);
  CHECK(rep.msw_allocation == std::vector<int>{1});
  CHECK(rep.allocations_scanned == 2);
}

TEST_CASE("ties resolve to the lexicographically first optimum") {
  const Instance inst = crafted({0.5, 0.5, 0.5, 0.5}, 2, 2);
  const ExhaustiveReport rep = exhaustive_scan(inst);
  CHECK(rep.ef_exists);    // the split {0},{1} is EF
  CHECK(rep.prop_exists);
  CHECK(rep.msw_value == 1.0);
  CHECK(rep.msw_allocation == std::vector<int>{0, 0});
}

TEST_CASE("scan counts n^m states and enforces the cap") {
  const Instance small = crafted(std::vector<double>(12, 0.5), 3, 4);
  CHECK(exhaustive_scan(small).allocations_scanned == 81);
  const Instance big = crafted(std::vector<double>(45, 0.5), 3, 15);
  CHECK_THROWS_AS(exhaustive_scan(big), std::invalid_argument);  // 3^15 > cap
}

TEST_CASE("chores scan minimizes total cost") {
  const Instance inst = crafted({0.9, 0.1}, 2, 1, Mode::Chores);
  const ExhaustiveReport rep = exhaustive_scan(inst);
  CHECK(rep.msw_allocation == std::vector<int>{1});
  CHECK(rep.msw_value == 0.1);
}

TEST_CASE("scan optimum equals the argmax allocation bit for bit") {
  SeededRng rng(0x0AC1E);
  const FamilyMixture mixes[] = {
      FamilyMixture::preset(FamilyMixture::Name::BetaUniform),
      FamilyMixture::preset(FamilyMixture::Name::UniformOnly),
      FamilyMixture::preset(FamilyMixture::Name::DiscreteAtom1),  // heavy ties
      FamilyMixture::preset(FamilyMixture::Name::NormalUniform),
  };
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng.next_below(3));
    const int m = 1 + static_cast<int>(rng.next_below(6));
    const Mode mode = (t % 5 == 4) ? Mode::Chores : Mode::Goods;
    const Instance inst =
        Instance::generate(n, m, mode, mixes[t % 4], rng.next_u64());
    const ExhaustiveReport rep = exhaustive_scan(inst);
    const Allocation argmax = allocate_argmax(inst);
    CHECK(rep.msw_allocation == argmax.owner());
    CHECK(rep.msw_value == social_welfare(inst, argmax));
  }
}

TEST_CASE("oracle existence flags upper-bound any concrete allocation") {
  SeededRng rng(0x0AC2E);
  const FamilyMixture mix = FamilyMixture::preset(FamilyMixture::Name::BetaUniform);
  int no_ef_seen = 0;
  for (int t = 0; t < 30; ++t) {
    const int n = 2;
    const int m = 1 + static_cast<int>(rng.next_below(4));
    const Instance inst = Instance::generate(n, m, Mode::Goods, mix, rng.next_u64());
    const ExhaustiveReport rep = exhaustive_scan(inst);
    const MetricsReport metrics = compute_metrics(inst, allocate_argmax(inst));
    if (!rep.ef_exists) {
      ++no_ef_seen;
      CHECK(!metrics.is_ef);
    }
    if (!rep.prop_exists) CHECK(!metrics.is_prop);
    if (metrics.is_ef) CHECK(rep.ef_exists);
    if (metrics.is_prop) CHECK(rep.prop_exists);
  }
  CHECK(no_ef_seen > 0);  // small m makes EF-impossible instances common
}

TEST_CASE("brute-force matching on hand graphs and its caps") {
  const BipartiteGraph k33(3, 3, {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}});
  CHECK(brute_max_matching(k33) == 3);
  const BipartiteGraph star(3, 3, {{0}, {0}, {0}});
  CHECK(brute_max_matching(star) == 1);
  const BipartiteGraph empty(2, 2, {{}, {}});
  CHECK(brute_max_matching(empty) == 0);

  const BipartiteGraph wide(9, 2, std::vector<std::vector<int>>(9));
  CHECK_THROWS_AS(brute_max_matching(wide), std::invalid_argument);
  const BipartiteGraph tall(2, 65, std::vector<std::vector<int>>(2));
  CHECK_THROWS_AS(brute_max_matching(tall), std::invalid_argument);
}

TEST_CASE("matching rate endpoints and determinism") {
  CHECK(matching_rate(20, 20, 1.0, 10, 1) == 1.0);
  CHECK(matching_rate(20, 20, 0.0, 10, 1) == 0.0);
  CHECK(matching_rate(30, 30, 0.3, 25, 42) == matching_rate(30, 30, 0.3, 25, 42));
  CHECK_THROWS_AS(matching_rate(5, 5, 0.5, 0, 1), std::invalid_argument);

  // Rectangular case: right saturation, trivially possible at p = 1.
  CHECK(matching_rate(10, 4, 1.0, 10, 2) == 1.0);
  CHECK(matching_rate(10, 4, 0.0, 10, 2) == 0.0);
}

TEST_CASE("dense bipartite graphs match above the log-degree threshold") {
  const int n = 200;
  const double p = 3.0 * std::log(static_cast<double>(n)) / n;
  CHECK(matching_rate(n, n, p, 50, 7) >= 0.95);
}
