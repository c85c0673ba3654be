#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fairdiv/allocators.hpp"
#include "fairdiv/instance.hpp"
#include "fairdiv/matching.hpp"
#include "fairdiv/metrics.hpp"
#include "fairdiv/oracle.hpp"
#include "fairdiv/rng.hpp"

namespace {

using namespace fairdiv;

Instance make_instance(int n, int m, FamilyMixture::Name name,
                       Mode mode = Mode::Goods) {
  return Instance::generate(n, m, mode, FamilyMixture::preset(name), 42);
}

void BM_generate_beta_uniform(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        make_instance(100, m, FamilyMixture::Name::BetaUniform));
    ++seed;
  }
  state.SetItemsProcessed(state.iterations() * 100 * m);
}
BENCHMARK(BM_generate_beta_uniform)->Arg(1000)->Arg(10000);

void BM_argmax(benchmark::State& state) {
  const Instance instance =
      make_instance(100, static_cast<int>(state.range(0)),
                    FamilyMixture::Name::BetaUniform);
  for (auto _ : state) benchmark::DoNotOptimize(allocate_argmax(instance));
}
BENCHMARK(BM_argmax)->Arg(1000)->Arg(10000);

void BM_sampling(benchmark::State& state) {
  const Instance instance =
      make_instance(100, 10000, FamilyMixture::Name::BetaUniform);
  const int s = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(allocate_sampling(instance, s, 7));
}
BENCHMARK(BM_sampling)->Arg(4)->Arg(23)->Arg(46);

void BM_max_matching(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<double> probs(static_cast<std::size_t>(n),
                                  2.0 * std::log(n) / n);
  const BipartiteGraph g = random_bipartite(n, n, probs, 11);
  for (auto _ : state) benchmark::DoNotOptimize(max_matching(g).cardinality());
}
BENCHMARK(BM_max_matching)->Arg(200)->Arg(1000);

void BM_metrics(benchmark::State& state) {
  const Instance instance =
      make_instance(100, static_cast<int>(state.range(0)),
                    FamilyMixture::Name::BetaUniform);
  const Allocation alloc = allocate_argmax(instance);
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_metrics(instance, alloc));
}
BENCHMARK(BM_metrics)->Arg(1000)->Arg(10000);

void BM_ef_small(benchmark::State& state) {
  const Instance instance =
      make_instance(50, 250, FamilyMixture::Name::UniformOnly);
  for (auto _ : state) benchmark::DoNotOptimize(allocate_ef_small(instance));
}
BENCHMARK(BM_ef_small);

void BM_exhaustive_scan(benchmark::State& state) {
  const Instance instance =
      make_instance(3, 6, FamilyMixture::Name::UniformOnly);
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_scan(instance));
}
BENCHMARK(BM_exhaustive_scan);

}  // namespace

BENCHMARK_MAIN();
