#include "fairdiv/allocators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fairdiv/metrics.hpp"

namespace fairdiv {

std::string_view fail_stage_str(FailStage stage) {
  switch (stage) {
    case FailStage::Stage1: return "stage1";
    case FailStage::Stage2: return "stage2";
    case FailStage::PerfectXMatching: return "perfect_x_matching";
    case FailStage::LeftSaturatedXMatching: return "left_saturated_x_matching";
    case FailStage::Phase1: return "phase1";
    case FailStage::Phase2: return "phase2";
  }
  return "?";
}

FailStage parse_fail_stage(std::string_view text) {
  if (text == "stage1") return FailStage::Stage1;
  if (text == "stage2") return FailStage::Stage2;
  if (text == "perfect_x_matching") return FailStage::PerfectXMatching;
  if (text == "left_saturated_x_matching") return FailStage::LeftSaturatedXMatching;
  if (text == "phase1") return FailStage::Phase1;
  if (text == "phase2") return FailStage::Phase2;
  throw std::invalid_argument("unknown fail stage '" + std::string(text) + "'");
}

Allocation allocate_argmax(const Instance& instance) {
  const int n = instance.n();
  const int m = instance.m();
  const bool maximize = instance.mode() == Mode::Goods;
  std::vector<int> owner(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    int best = 0;
    double best_value = instance.value(0, j);
    for (int i = 1; i < n; ++i) {
      const double v = instance.value(i, j);
      if (maximize ? v > best_value : v < best_value) {
        best = i;
        best_value = v;
      }
    }
    owner[static_cast<std::size_t>(j)] = best;
  }
  return Allocation(n, std::move(owner), Allocation::Provenance::ArgMax);
}

int sample_size(SampleRegime regime, int m, double alpha_min) {
  if (m < 2) throw std::invalid_argument("sample_size: m must be >= 2");
  if (!(alpha_min > 0.0))
    throw std::invalid_argument(
        "sample_size: alpha_min must be positive (the formula divides by it)");
  const double log_m = std::log(static_cast<double>(m));
  double raw = 0.0;
  switch (regime) {
    case SampleRegime::Discrete: raw = 2.0 * log_m / alpha_min; break;
    case SampleRegime::ContinuousConstant: raw = 20.0 * log_m / alpha_min; break;
    case SampleRegime::ContinuousBoundedMean:
      raw = 2.0 * log_m * log_m / alpha_min;
      break;
  }
  // Same rounding-noise guard as prop_linear_r: keep mathematically integral
  // formula values from being bumped to the next integer.
  return static_cast<int>(std::ceil(raw - 1e-9));
}

std::pair<Allocation, SampleLog> allocate_sampling(
    const Instance& instance, int s, std::uint64_t seed,
    std::vector<std::pair<int, int>>* access_log) {
  if (instance.mode() != Mode::Goods)
    throw std::invalid_argument("allocate_sampling: goods mode only");
  const int n = instance.n();
  const int m = instance.m();
  if (s < 1 || s > n)
    throw std::invalid_argument("allocate_sampling: need 1 <= s <= n");

  SeededRng rng(seed);
  std::vector<int> owner(static_cast<std::size_t>(m));
  SampleLog log;
  log.sampled.resize(static_cast<std::size_t>(m));
  log.winner.resize(static_cast<std::size_t>(m));
  log.winning_value.resize(static_cast<std::size_t>(m));

  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int j = 0; j < m; ++j) {
    // Partial Fisher-Yates: the first s pool entries become the sample.
    std::iota(pool.begin(), pool.end(), 0);
    int best = -1;
    double best_value = 0.0;
    auto& sampled = log.sampled[static_cast<std::size_t>(j)];
    sampled.resize(static_cast<std::size_t>(s));
    for (int t = 0; t < s; ++t) {
      const int k =
          t + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - t)));
      std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(k)]);
      const int agent = pool[static_cast<std::size_t>(t)];
      sampled[static_cast<std::size_t>(t)] = agent;
      const double v = instance.value(agent, j);
      if (access_log) access_log->emplace_back(agent, j);
      if (best == -1 || v > best_value || (v == best_value && agent < best)) {
        best = agent;
        best_value = v;
      }
    }
    owner[static_cast<std::size_t>(j)] = best;
    log.winner[static_cast<std::size_t>(j)] = best;
    log.winning_value[static_cast<std::size_t>(j)] = best_value;
  }
  return {Allocation(n, std::move(owner), Allocation::Provenance::Sampling),
          std::move(log)};
}

namespace {

// Density lower bounds for every item; errors (with the item index) when an
// item is not PDF-bounded away from zero, since the threshold formulas
// divide by alpha_j.
std::vector<double> item_alphas(const Instance& instance) {
  std::vector<double> alphas(static_cast<std::size_t>(instance.m()));
  for (int j = 0; j < instance.m(); ++j) {
    const double alpha = instance.item_spec(j).pdf_bounds().alpha;
    if (!(alpha > 0.0))
      throw std::invalid_argument(
          "thresholds: item " + std::to_string(j) +
          " has density lower bound 0; the threshold formula needs alpha_j > 0");
    alphas[static_cast<std::size_t>(j)] = alpha;
  }
  return alphas;
}

Thresholds make_thresholds(const Instance& instance, bool goods) {
  const std::vector<double> alphas = item_alphas(instance);
  const double log_n = std::log(static_cast<double>(instance.n()));
  Thresholds t;
  t.alpha_min = *std::min_element(alphas.begin(), alphas.end());
  t.tau.resize(alphas.size());
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const double gap = 1.1 * log_n / (alphas[j] * instance.n());
    t.tau[j] = goods ? 1.0 - gap : gap;
  }
  return t;
}

std::vector<int> index_range(int first, int last) {
  std::vector<int> out(static_cast<std::size_t>(last - first));
  std::iota(out.begin(), out.end(), first);
  return out;
}

std::vector<double> slice(const std::vector<double>& v, int first, int last) {
  return std::vector<double>(v.begin() + first, v.begin() + last);
}

}  // namespace

Thresholds goods_thresholds(const Instance& instance) {
  return make_thresholds(instance, /*goods=*/true);
}

AllocOutcome allocate_ef_small(const Instance& instance) {
  if (instance.mode() != Mode::Goods)
    throw std::invalid_argument("allocate_ef_small: goods mode only");
  const int n = instance.n();
  const int m = instance.m();
  if (m % n != 0)
    throw std::invalid_argument("allocate_ef_small: m must be divisible by n");
  const int x = m / n;
  const Thresholds t = goods_thresholds(instance);
  const BipartiteGraph g = threshold_graph(instance, index_range(0, m), t.tau,
                                           ThresholdDirection::AtLeast);
  const std::optional<Matching> matching = perfect_r_matching(g, x);
  if (!matching) return AllocOutcome::infeasible(FailStage::PerfectXMatching);
  std::vector<int> owner(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    owner[static_cast<std::size_t>(j)] =
        matching->right_to_left[static_cast<std::size_t>(j)];
  return AllocOutcome::ok(
      Allocation(n, std::move(owner), Allocation::Provenance::EfSmall));
}

AllocOutcome allocate_prop_two_stage(const Instance& instance) {
  if (instance.mode() != Mode::Goods)
    throw std::invalid_argument("allocate_prop_two_stage: goods mode only");
  const int n = instance.n();
  const int m = instance.m();
  if (m < n || m > 2 * n)
    throw std::invalid_argument("allocate_prop_two_stage: need n <= m <= 2n");

  const Thresholds t = goods_thresholds(instance);

  // Stage 1: perfect matching between agents and the first n goods at the
  // tau thresholds.
  const BipartiteGraph g1 = threshold_graph(
      instance, index_range(0, n), slice(t.tau, 0, n), ThresholdDirection::AtLeast);
  const std::optional<Matching> stage1 = perfect_r_matching(g1, 1);
  if (!stage1) return AllocOutcome::infeasible(FailStage::Stage1);

  std::vector<int> owner(static_cast<std::size_t>(m), -1);
  std::vector<double> matched_value(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    const int agent = stage1->right_to_left[static_cast<std::size_t>(j)];
    owner[static_cast<std::size_t>(j)] = agent;
    matched_value[static_cast<std::size_t>(agent)] = instance.value(agent, j);
  }

  // Violators still sit below their proportional share after stage 1.
  std::vector<double> share(static_cast<std::size_t>(n));
  std::vector<int> violators;
  for (int i = 0; i < n; ++i) {
    share[static_cast<std::size_t>(i)] = instance.row_total(i) / n;
    if (matched_value[static_cast<std::size_t>(i)] <
        share[static_cast<std::size_t>(i)] - kMetricSlack)
      violators.push_back(i);
  }

  // Stage 2: match every violator to a leftover good that covers its
  // remaining need.
  const int y = m - n;
  if (!violators.empty()) {
    std::vector<std::vector<int>> fix_adj(violators.size());
    for (std::size_t vi = 0; vi < violators.size(); ++vi) {
      const int i = violators[vi];
      const double need = share[static_cast<std::size_t>(i)] -
                          matched_value[static_cast<std::size_t>(i)];
      for (int idx = 0; idx < y; ++idx)
        if (instance.value(i, n + idx) >= need - kMetricSlack)
          fix_adj[vi].push_back(idx);
    }
    const BipartiteGraph g2(static_cast<int>(violators.size()), y, std::move(fix_adj));
    const Matching stage2 = max_matching(g2);
    if (stage2.cardinality() < static_cast<int>(violators.size()))
      return AllocOutcome::infeasible(FailStage::Stage2);
    for (int idx = 0; idx < y; ++idx) {
      const int vi = stage2.right_to_left[static_cast<std::size_t>(idx)];
      if (vi >= 0)
        owner[static_cast<std::size_t>(n + idx)] = violators[static_cast<std::size_t>(vi)];
    }
  }

  // Unassigned leftovers go to agent 0; extra goods never hurt.
  for (int j = n; j < m; ++j)
    if (owner[static_cast<std::size_t>(j)] < 0) owner[static_cast<std::size_t>(j)] = 0;

  return AllocOutcome::ok(
      Allocation(n, std::move(owner), Allocation::Provenance::PropTwoStage));
}

int prop_linear_r(double c) {
  if (!(c >= 0.0 && c < 1.0))
    throw std::invalid_argument("prop_linear_r: need 0 <= c < 1");
  // Shave rounding noise before the ceiling so mathematically integral
  // values stay put (e.g. c = 0.9 gives exactly 78, but the division lands
  // a few ulps above it).
  return static_cast<int>(std::ceil(2.0 * (3.0 + c) / (1.0 - c) - 1e-9));
}

AllocOutcome allocate_prop_linear(const Instance& instance, double c) {
  if (instance.mode() != Mode::Goods)
    throw std::invalid_argument("allocate_prop_linear: goods mode only");
  const int n = instance.n();
  const int m = instance.m();
  const int r = prop_linear_r(c);
  for (int j = 0; j < m; ++j)
    if (instance.item_spec(j).mean() > c + kMetricSlack)
      throw std::invalid_argument("allocate_prop_linear: item " +
                                  std::to_string(j) + " has mean above c");
  if (m < static_cast<long long>(r) * n)
    throw std::invalid_argument("allocate_prop_linear: need m >= r*n = " +
                                std::to_string(static_cast<long long>(r) * n));

  const int x = m / n;
  const Thresholds t = goods_thresholds(instance);
  const BipartiteGraph g = threshold_graph(instance, index_range(0, m), t.tau,
                                           ThresholdDirection::AtLeast);
  // All x*n clones must be matched; y = m - x*n goods stay over.
  const std::optional<Matching> matching = perfect_r_matching(g, x);
  if (!matching)
    return AllocOutcome::infeasible(FailStage::LeftSaturatedXMatching);

  std::vector<int> owner(static_cast<std::size_t>(m), -1);
  for (int j = 0; j < m; ++j)
    owner[static_cast<std::size_t>(j)] =
        matching->right_to_left[static_cast<std::size_t>(j)];
  int next_agent = 0;
  for (int j = 0; j < m; ++j) {
    if (owner[static_cast<std::size_t>(j)] >= 0) continue;
    owner[static_cast<std::size_t>(j)] = next_agent;
    next_agent = (next_agent + 1) % n;
  }
  return AllocOutcome::ok(
      Allocation(n, std::move(owner), Allocation::Provenance::PropLinear));
}

AllocOutcome allocate_ef_small_chores(const Instance& instance) {
  if (instance.mode() != Mode::Chores)
    throw std::invalid_argument("allocate_ef_small_chores: chores mode only");
  const int n = instance.n();
  const int m = instance.m();
  const int x = m / n;
  const int y = m - x * n;
  const Thresholds t = make_thresholds(instance, /*goods=*/false);

  std::vector<int> owner(static_cast<std::size_t>(m), -1);

  // Phase 1: perfect x-matching over the first x*n chores, each agent taking
  // exactly x chores it finds cheap enough.
  if (x > 0) {
    const BipartiteGraph g1 =
        threshold_graph(instance, index_range(0, x * n), slice(t.tau, 0, x * n),
                        ThresholdDirection::AtMost);
    const std::optional<Matching> phase1 = perfect_r_matching(g1, x);
    if (!phase1) return AllocOutcome::infeasible(FailStage::Phase1);
    for (int j = 0; j < x * n; ++j)
      owner[static_cast<std::size_t>(j)] =
          phase1->right_to_left[static_cast<std::size_t>(j)];
  }

  // Phase 2: the remaining y chores each go to a distinct agent, at the
  // uniform alpha_min threshold.
  if (y > 0) {
    const double tau_uniform = 1.1 * std::log(static_cast<double>(n)) /
                               (t.alpha_min * n);
    const std::vector<double> taus(static_cast<std::size_t>(y), tau_uniform);
    const BipartiteGraph g2 = threshold_graph(instance, index_range(x * n, m),
                                              taus, ThresholdDirection::AtMost);
    const std::optional<Matching> phase2 = right_saturated_matching(g2);
    if (!phase2) return AllocOutcome::infeasible(FailStage::Phase2);
    for (int idx = 0; idx < y; ++idx)
      owner[static_cast<std::size_t>(x * n + idx)] =
          phase2->right_to_left[static_cast<std::size_t>(idx)];
  }

  return AllocOutcome::ok(
      Allocation(n, std::move(owner), Allocation::Provenance::ChoresEfSmall));
}

}  // namespace fairdiv
