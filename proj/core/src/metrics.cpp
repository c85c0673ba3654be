#include "fairdiv/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "fairdiv/allocators.hpp"

namespace fairdiv {
namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_compatible(const Instance& instance, const Allocation& alloc) {
  if (alloc.n() != instance.n() || alloc.m() != instance.m())
    throw std::invalid_argument("metrics: allocation does not fit the instance");
}

// bundle_values[i*n + k] = value agent i assigns to agent k's bundle,
// accumulated in ascending item order (the canonical summation order used
// throughout, so independent recomputations agree bit-for-bit).
std::vector<double> cross_bundle_values(const Instance& instance,
                                        const Allocation& alloc) {
  const int n = instance.n();
  const int m = instance.m();
  std::vector<double> bv(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < m; ++j) {
    const int owner = alloc.owner_of(j);
    for (int i = 0; i < n; ++i)
      bv[static_cast<std::size_t>(i) * n + owner] += instance.value(i, j);
  }
  return bv;
}

std::vector<double> envy_from_bundle_values(const std::vector<double>& bv, int n,
                                            Mode mode) {
  std::vector<double> envy(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double own = bv[static_cast<std::size_t>(i) * n + i];
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      const double other = bv[static_cast<std::size_t>(i) * n + k];
      const double raw = mode == Mode::Goods ? other - own : own - other;
      envy[static_cast<std::size_t>(i) * n + k] = raw > 0.0 ? raw : 0.0;
    }
  }
  return envy;
}

}  // namespace

std::vector<double> envy_matrix(const Instance& instance, const Allocation& alloc) {
  check_compatible(instance, alloc);
  return envy_from_bundle_values(cross_bundle_values(instance, alloc),
                                 instance.n(), instance.mode());
}

double worst_envy_ratio(const Instance& instance, const Allocation& alloc) {
  if (instance.mode() != Mode::Goods)
    throw std::invalid_argument("worst_envy_ratio is defined for goods only");
  check_compatible(instance, alloc);
  const int n = instance.n();
  const std::vector<double> bv = cross_bundle_values(instance, alloc);
  const std::vector<double> envy = envy_from_bundle_values(bv, n, Mode::Goods);
  double worst = 1.0;
  for (int i = 0; i < n; ++i) {
    double e_i = 0.0;
    for (int k = 0; k < n; ++k) e_i = std::max(e_i, envy[static_cast<std::size_t>(i) * n + k]);
    if (e_i <= kMetricSlack) continue;  // envy-free agent contributes exactly 1
    const double own = bv[static_cast<std::size_t>(i) * n + i];
    if (own == 0.0) return kInf;
    worst = std::max(worst, 1.0 + e_i / own);
  }
  return worst;
}

double fraction_envious(const Instance& instance, const Allocation& alloc) {
  check_compatible(instance, alloc);
  const int n = instance.n();
  const std::vector<double> envy = envy_matrix(instance, alloc);
  int envious = 0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (envy[static_cast<std::size_t>(i) * n + k] > kMetricSlack) {
        ++envious;
        break;
      }
    }
  }
  return static_cast<double>(envious) / n;
}

double social_welfare(const Instance& instance, const Allocation& alloc) {
  check_compatible(instance, alloc);
  const int n = instance.n();
  const int m = instance.m();
  // Per-agent own-bundle sums in ascending item order, then summed over
  // agents in ascending index order: the canonical order.
  std::vector<double> own(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < m; ++j)
    own[static_cast<std::size_t>(alloc.owner_of(j))] +=
        instance.value(alloc.owner_of(j), j);
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += own[static_cast<std::size_t>(i)];
  return total;
}

MetricsReport compute_metrics(const Instance& instance, const Allocation& alloc) {
  check_compatible(instance, alloc);
  const int n = instance.n();
  const Mode mode = instance.mode();
  const std::vector<double> bv = cross_bundle_values(instance, alloc);

  MetricsReport rep;
  rep.n = n;
  rep.envy = envy_from_bundle_values(bv, n, mode);

  int envious = 0;
  bool ef = true;
  double worst_ratio = 1.0;
  bool ratio_infinite = false;
  for (int i = 0; i < n; ++i) {
    double e_i = 0.0;
    for (int k = 0; k < n; ++k)
      e_i = std::max(e_i, rep.envy[static_cast<std::size_t>(i) * n + k]);
    if (e_i > kMetricSlack) {
      ++envious;
      ef = false;
      const double own = bv[static_cast<std::size_t>(i) * n + i];
      if (own == 0.0)
        ratio_infinite = true;
      else
        worst_ratio = std::max(worst_ratio, 1.0 + e_i / own);
    }
  }
  rep.fraction_envious = static_cast<double>(envious) / n;
  rep.is_ef = ef;
  if (mode == Mode::Goods)
    rep.worst_envy_ratio = ratio_infinite ? kInf : worst_ratio;

  rep.social_welfare = social_welfare(instance, alloc);

  rep.prop_shortfalls.assign(static_cast<std::size_t>(n), 0.0);
  bool prop = true;
  for (int i = 0; i < n; ++i) {
    const double share = instance.row_total(i) / n;
    const double own = bv[static_cast<std::size_t>(i) * n + i];
    const double shortfall = mode == Mode::Goods ? share - own : own - share;
    rep.prop_shortfalls[static_cast<std::size_t>(i)] =
        shortfall > 0.0 ? shortfall : 0.0;
    if (shortfall > kMetricSlack) prop = false;
  }
  rep.is_prop = prop;
  return rep;
}

ApproxChecks approx_checks(const Instance& instance, const Allocation& alloc,
                           double c) {
  if (instance.mode() != Mode::Goods)
    throw std::invalid_argument("approx_checks is defined for goods only");
  if (!(c > 0.0 && c <= 1.0))
    throw std::invalid_argument("approx_checks: c must lie in (0, 1]");
  check_compatible(instance, alloc);
  const int n = instance.n();
  const std::vector<double> bv = cross_bundle_values(instance, alloc);
  ApproxChecks out;
  out.c_ef = true;
  for (int i = 0; i < n && out.c_ef; ++i) {
    const double own = bv[static_cast<std::size_t>(i) * n + i];
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      if (own < c * bv[static_cast<std::size_t>(i) * n + k] - kMetricSlack) {
        out.c_ef = false;
        break;
      }
    }
  }
  const double optimum = social_welfare(instance, allocate_argmax(instance));
  out.c_msw = social_welfare(instance, alloc) >= c * optimum - kMetricSlack;
  return out;
}

double welfare_ratio(const Allocation& sampled, const Allocation& full,
                     const Instance& instance) {
  const double ws = social_welfare(instance, sampled);
  const double wf = social_welfare(instance, full);
  if (wf == 0.0) return ws == 0.0 ? 1.0 : kInf;
  return ws / wf;
}

namespace {

json number_or_inf(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

double parse_number_or_inf(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw std::invalid_argument("MetricsReport: bad numeric string '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

std::string MetricsReport::to_json() const {
  json j;
  j["worst_envy_ratio"] =
      worst_envy_ratio ? number_or_inf(*worst_envy_ratio) : json(nullptr);
  j["fraction_envious"] = fraction_envious;
  j["social_welfare"] = social_welfare;
  j["is_ef"] = is_ef;
  j["is_prop"] = is_prop;
  return j.dump();
}

MetricsReport MetricsReport::from_json(const std::string& text) {
  const json j = json::parse(text);
  MetricsReport rep;
  if (!j.at("worst_envy_ratio").is_null())
    rep.worst_envy_ratio = parse_number_or_inf(j.at("worst_envy_ratio"));
  rep.fraction_envious = j.at("fraction_envious").get<double>();
  rep.social_welfare = j.at("social_welfare").get<double>();
  rep.is_ef = j.at("is_ef").get<bool>();
  rep.is_prop = j.at("is_prop").get<bool>();
  return rep;
}

bool MetricsReport::operator==(const MetricsReport& other) const {
  return n == other.n && envy == other.envy &&
         worst_envy_ratio == other.worst_envy_ratio &&
         fraction_envious == other.fraction_envious &&
         social_welfare == other.social_welfare && is_ef == other.is_ef &&
         is_prop == other.is_prop && prop_shortfalls == other.prop_shortfalls;
}

}  // namespace fairdiv
