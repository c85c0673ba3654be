#include "fairdiv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "fairdiv/allocators.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Each sampling run gets its own stream, salted by s so different sample
// sizes on the same instance draw independent permutations.
constexpr std::uint64_t kSamplingSalt = 0x53616d706c65ULL;

[[noreturn]] void config_error(const std::string& message) {
  throw std::invalid_argument("ExperimentConfig: " + message);
}

const json& require_field(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) config_error(std::string("missing field '") + name + "'");
  return *it;
}

long long as_integer(const json& j, const char* name) {
  if (!j.is_number_integer())
    config_error(std::string("field '") + name + "' must be an integer");
  return j.get<long long>();
}

double as_number(const json& j, const char* name) {
  if (!j.is_number())
    config_error(std::string("field '") + name + "' must be a number");
  return j.get<double>();
}

std::string as_string(const json& j, const char* name) {
  if (!j.is_string())
    config_error(std::string("field '") + name + "' must be a string");
  return j.get<std::string>();
}

bool algorithm_known(const std::string& name) {
  for (const char* known : kAlgorithmNames)
    if (name == known) return true;
  return false;
}

bool goods_only_algorithm(const std::string& name) {
  return name == "sampling" || name == "ef_small" ||
         name == "prop_two_stage" || name == "prop_linear";
}

void check_range(const Range& r, const char* name, bool positive_lo = false) {
  if (!(r.lo <= r.hi))
    config_error(std::string("field 'mixture_params': range '") + name +
                 "' needs lo <= hi");
  if (positive_lo && !(r.lo > 0.0))
    config_error(std::string("field 'mixture_params': range '") + name +
                 "' needs lo > 0");
}

// %.17g round-trips doubles exactly and prints infinities as "inf".
std::string fmt17(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

double parse_number_or_inf(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw std::invalid_argument(std::string("TrialResult: field '") + what +
                              "' must be a number or \"inf\"/\"-inf\"");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in.good() && !in.eof())
    throw std::runtime_error("cannot read file: " + path.string());
  return buffer.str();
}

// Write-once cache entry: write a sibling temp file, then rename into place.
// Renaming is atomic, so a concurrent reader never sees a partial file.
void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create file: " + tmp.string());
    out << content;
    if (!out.good())
      throw std::runtime_error("cannot write file: " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 1) config_error("field 'n' must be >= 1");
  if (m_values.empty()) config_error("field 'm_values' must be non-empty");
  for (int m : m_values)
    if (m < 1) config_error("field 'm_values' entries must be >= 1");
  if (trials < 1) config_error("field 'trials' must be >= 1");
  if (output_dir.empty()) config_error("field 'output_dir' must be non-empty");
  if (algorithms.empty()) config_error("field 'algorithms' must be non-empty");
  bool has_sampling = false;
  bool has_prop_linear = false;
  for (const std::string& a : algorithms) {
    if (!algorithm_known(a))
      config_error("field 'algorithms': unknown algorithm '" + a + "'");
    if (a == "sampling") has_sampling = true;
    if (a == "prop_linear") has_prop_linear = true;
    if (goods_only_algorithm(a) && mode != Mode::Goods)
      config_error("field 'algorithms': '" + a + "' requires mode \"goods\"");
    if (a == "chores_ef_small" && mode != Mode::Chores)
      config_error(
          "field 'algorithms': 'chores_ef_small' requires mode \"chores\"");
  }
  if (has_sampling) {
    if (s_values.empty())
      config_error("field 's_values' must be non-empty when sampling is run");
    for (int s : s_values)
      if (s < 1 || s > n)
        config_error("field 's_values' entries must satisfy 1 <= s <= n");
  }
  if (has_prop_linear) {
    if (!c) config_error("field 'c' is required when prop_linear is run");
    if (!(*c >= 0.0 && *c < 1.0))
      config_error("field 'c' must satisfy 0 <= c < 1");
  }

  switch (mixture.name) {
    case FamilyMixture::Name::BetaUniform:
      check_range(mixture.beta_shape1, "beta_shape1", /*positive_lo=*/true);
      check_range(mixture.beta_shape2, "beta_shape2", /*positive_lo=*/true);
      check_range(mixture.uniform_a, "uniform_a");
      check_range(mixture.uniform_b, "uniform_b");
      break;
    case FamilyMixture::Name::NormalUniform:
      check_range(mixture.normal_location, "normal_location");
      check_range(mixture.normal_scale, "normal_scale", /*positive_lo=*/true);
      check_range(mixture.uniform_a, "uniform_a");
      check_range(mixture.uniform_b, "uniform_b");
      break;
    case FamilyMixture::Name::UniformOnly:
      check_range(mixture.uniform_a, "uniform_a");
      check_range(mixture.uniform_b, "uniform_b");
      break;
    case FamilyMixture::Name::DiscreteAtom1:
      check_range(mixture.atom_mass, "atom_mass", /*positive_lo=*/true);
      if (!(mixture.atom_mass.hi <= 1.0))
        config_error("field 'mixture_params': range 'atom_mass' needs hi <= 1");
      if (mixture.support_points_min < 2)
        config_error("field 'mixture_params': 'support_points_min' must be >= 2");
      if (mixture.support_points_max < mixture.support_points_min)
        config_error(
            "field 'mixture_params': 'support_points_max' must be >= "
            "'support_points_min'");
      break;
  }
  if (mixture.name != FamilyMixture::Name::DiscreteAtom1 &&
      !(mixture.uniform_a.hi < mixture.uniform_b.lo))
    config_error(
        "field 'mixture_params': need uniform_a.hi < uniform_b.lo so every "
        "drawn uniform interval is non-degenerate");
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["n"] = n;
  j["m_values"] = m_values;
  j["mode"] = std::string(mode_str(mode));
  j["mixture"] = std::string(mixture.name_str());
  json params;
  params["beta_shape1"] = {mixture.beta_shape1.lo, mixture.beta_shape1.hi};
  params["beta_shape2"] = {mixture.beta_shape2.lo, mixture.beta_shape2.hi};
  params["normal_location"] = {mixture.normal_location.lo,
                               mixture.normal_location.hi};
  params["normal_scale"] = {mixture.normal_scale.lo, mixture.normal_scale.hi};
  params["uniform_a"] = {mixture.uniform_a.lo, mixture.uniform_a.hi};
  params["uniform_b"] = {mixture.uniform_b.lo, mixture.uniform_b.hi};
  params["atom_mass"] = {mixture.atom_mass.lo, mixture.atom_mass.hi};
  params["support_points_min"] = mixture.support_points_min;
  params["support_points_max"] = mixture.support_points_max;
  j["mixture_params"] = params;
  j["algorithms"] = algorithms;
  if (!s_values.empty()) j["s_values"] = s_values;
  j["trials"] = trials;
  j["base_seed"] = base_seed;
  if (c) j["c"] = *c;
  j["output_dir"] = output_dir;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("top level must be a JSON object");

  static const char* known_fields[] = {
      "n",      "m_values",  "mode",   "mixture",   "mixture_params",
      "algorithms", "s_values", "trials", "base_seed", "c",
      "output_dir"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* f : known_fields)
      if (key == f) known = true;
    if (!known) config_error("unknown field '" + key + "'");
  }

  ExperimentConfig cfg;
  cfg.n = static_cast<int>(as_integer(require_field(j, "n"), "n"));

  const json& jm = require_field(j, "m_values");
  if (!jm.is_array()) config_error("field 'm_values' must be an array");
  for (const json& v : jm)
    cfg.m_values.push_back(static_cast<int>(as_integer(v, "m_values")));

  cfg.mode = parse_mode(as_string(require_field(j, "mode"), "mode"));

  const std::string mixture_name =
      as_string(require_field(j, "mixture"), "mixture");
  const auto parsed = FamilyMixture::parse_name(mixture_name);
  if (!parsed)
    config_error("field 'mixture': unknown mixture '" + mixture_name + "'");
  cfg.mixture = FamilyMixture::preset(*parsed);

  if (const auto it = j.find("mixture_params"); it != j.end()) {
    if (!it->is_object())
      config_error("field 'mixture_params' must be an object");
    const auto range_of = [](const json& v, const std::string& key) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
          !v[1].is_number())
        config_error("field 'mixture_params': '" + key +
                     "' must be a two-number array [lo, hi]");
      return Range{v[0].get<double>(), v[1].get<double>()};
    };
    for (const auto& [key, value] : it->items()) {
      if (key == "beta_shape1") cfg.mixture.beta_shape1 = range_of(value, key);
      else if (key == "beta_shape2") cfg.mixture.beta_shape2 = range_of(value, key);
      else if (key == "normal_location")
        cfg.mixture.normal_location = range_of(value, key);
      else if (key == "normal_scale")
        cfg.mixture.normal_scale = range_of(value, key);
      else if (key == "uniform_a") cfg.mixture.uniform_a = range_of(value, key);
      else if (key == "uniform_b") cfg.mixture.uniform_b = range_of(value, key);
      else if (key == "atom_mass") cfg.mixture.atom_mass = range_of(value, key);
      else if (key == "support_points_min")
        cfg.mixture.support_points_min =
            static_cast<int>(as_integer(value, "support_points_min"));
      else if (key == "support_points_max")
        cfg.mixture.support_points_max =
            static_cast<int>(as_integer(value, "support_points_max"));
      else
        config_error("field 'mixture_params': unknown parameter '" + key + "'");
    }
  }

  const json& ja = require_field(j, "algorithms");
  if (!ja.is_array()) config_error("field 'algorithms' must be an array");
  for (const json& v : ja)
    cfg.algorithms.push_back(as_string(v, "algorithms"));

  if (const auto it = j.find("s_values"); it != j.end()) {
    if (!it->is_array()) config_error("field 's_values' must be an array");
    for (const json& v : *it)
      cfg.s_values.push_back(static_cast<int>(as_integer(v, "s_values")));
  }

  cfg.trials = static_cast<int>(as_integer(require_field(j, "trials"), "trials"));

  const json& jseed = require_field(j, "base_seed");
  if (!jseed.is_number_integer() && !jseed.is_number_unsigned())
    config_error("field 'base_seed' must be an integer");
  cfg.base_seed = jseed.get<std::uint64_t>();

  if (const auto it = j.find("c"); it != j.end())
    cfg.c = as_number(*it, "c");

  cfg.output_dir = as_string(require_field(j, "output_dir"), "output_dir");

  cfg.validate();
  return cfg;
}

std::string TrialKey::relative_path() const {
  std::string file = "n" + std::to_string(n) + "_m" + std::to_string(m) + "_s" +
                     (s ? std::to_string(*s) : std::string("na")) + "_t" +
                     std::to_string(trial) + ".json";
  return mixture + "/" + algorithm + "/" + file;
}

std::string TrialResult::to_json() const {
  json j;
  json jk;
  jk["n"] = key.n;
  jk["m"] = key.m;
  jk["s"] = key.s ? json(*key.s) : json(nullptr);
  jk["mixture"] = key.mixture;
  jk["algorithm"] = key.algorithm;
  jk["trial"] = key.trial;
  j["key"] = jk;
  j["outcome"] = success ? "success" : "infeasible";
  if (failed_stage) j["failed_stage"] = *failed_stage;
  if (metrics) j["metrics"] = json::parse(metrics->to_json());
  if (welfare_ratio) j["welfare_ratio"] = number_or_inf(*welfare_ratio);
  j["wall_time_ms"] = wall_time_ms;
  return j.dump(2);
}

TrialResult TrialResult::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("TrialResult: invalid JSON: ") +
                                e.what());
  }
  TrialResult r;
  const json& jk = j.at("key");
  r.key.n = jk.at("n").get<int>();
  r.key.m = jk.at("m").get<int>();
  if (!jk.at("s").is_null()) r.key.s = jk.at("s").get<int>();
  r.key.mixture = jk.at("mixture").get<std::string>();
  r.key.algorithm = jk.at("algorithm").get<std::string>();
  r.key.trial = jk.at("trial").get<int>();
  const std::string outcome = j.at("outcome").get<std::string>();
  if (outcome == "success") {
    r.success = true;
  } else if (outcome == "infeasible") {
    r.success = false;
  } else {
    throw std::invalid_argument("TrialResult: unknown outcome '" + outcome + "'");
  }
  if (const auto it = j.find("failed_stage"); it != j.end())
    r.failed_stage = it->get<std::string>();
  if (const auto it = j.find("metrics"); it != j.end())
    r.metrics = MetricsReport::from_json(it->dump());
  if (const auto it = j.find("welfare_ratio"); it != j.end())
    r.welfare_ratio = parse_number_or_inf(*it, "welfare_ratio");
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  return r;
}

namespace {

// One cell = one TrialResult to produce (an algorithm, with its s when
// sampling, on one (m, trial) instance).
struct Cell {
  std::string algorithm;
  std::optional<int> s;
};

std::vector<Cell> config_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (const std::string& a : config.algorithms) {
    if (a == "sampling") {
      for (int s : config.s_values) cells.push_back({a, s});
    } else {
      cells.push_back({a, std::nullopt});
    }
  }
  return cells;
}

// Runs every cell of one (m, trial) group, reusing the instance and the
// argmax allocation across cells. Only generates the instance when at least
// one cell is missing from the cache.
void run_unit(const ExperimentConfig& config, int m, int trial,
              const std::vector<Cell>& cells, std::vector<TrialResult>& out,
              std::atomic<long long>& executed,
              std::atomic<long long>& cache_hits) {
  const fs::path root(config.output_dir);
  out.resize(cells.size());

  std::vector<std::size_t> missing;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    TrialKey key{config.n, m, cells[ci].s, std::string(config.mixture.name_str()),
                 cells[ci].algorithm, trial};
    const fs::path path = root / key.relative_path();
    if (fs::exists(path)) {
      TrialResult cached = TrialResult::from_json(read_file(path));
      if (!(cached.key == key))
        throw std::runtime_error("cache file key mismatch: " + path.string());
      out[ci] = std::move(cached);
      cache_hits.fetch_add(1, std::memory_order_relaxed);
    } else {
      out[ci].key = key;
      missing.push_back(ci);
    }
  }
  if (missing.empty()) return;

  const std::uint64_t trial_seed =
      mix_seed(config.base_seed, static_cast<std::uint64_t>(trial));
  const std::uint64_t instance_seed =
      mix_seed(trial_seed, static_cast<std::uint64_t>(m));
  const Instance instance =
      Instance::generate(config.n, m, config.mode, config.mixture, instance_seed);

  // The argmax allocation doubles as the welfare_ratio baseline for sampling
  // cells, so it is computed at most once per group whether or not argmax is
  // itself in the algorithm list.
  std::optional<Allocation> argmax_alloc;
  const auto argmax_baseline = [&]() -> const Allocation& {
    if (!argmax_alloc) argmax_alloc = allocate_argmax(instance);
    return *argmax_alloc;
  };

  for (std::size_t ci : missing) {
    const Cell& cell = cells[ci];
    TrialResult& r = out[ci];

    const auto start = std::chrono::steady_clock::now();
    std::optional<Allocation> alloc;
    if (cell.algorithm == "argmax") {
      alloc = allocate_argmax(instance);
    } else if (cell.algorithm == "sampling") {
      const std::uint64_t sampling_seed = mix_seed(
          instance_seed, kSamplingSalt + static_cast<std::uint64_t>(*cell.s));
      alloc = allocate_sampling(instance, *cell.s, sampling_seed).first;
    } else {
      AllocOutcome outcome =
          cell.algorithm == "ef_small" ? allocate_ef_small(instance)
          : cell.algorithm == "prop_two_stage"
              ? allocate_prop_two_stage(instance)
          : cell.algorithm == "prop_linear"
              ? allocate_prop_linear(instance, *config.c)
              : allocate_ef_small_chores(instance);
      if (outcome.success()) {
        alloc = std::move(outcome.allocation);
      } else {
        r.success = false;
        r.failed_stage = std::string(fail_stage_str(*outcome.failed_stage));
      }
    }
    const auto stop = std::chrono::steady_clock::now();
    r.wall_time_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();

    if (alloc) {
      r.success = true;
      r.metrics = compute_metrics(instance, *alloc);
      if (cell.algorithm == "sampling")
        r.welfare_ratio = welfare_ratio(*alloc, argmax_baseline(), instance);
    }

    write_file_atomic(root / r.key.relative_path(), r.to_json());
    executed.fetch_add(1, std::memory_order_relaxed);
  }
}

}  // namespace

std::vector<TrialResult> run(const ExperimentConfig& config, RunStats* stats,
                             int jobs) {
  config.validate();
  if (jobs < 1) throw std::invalid_argument("run: jobs must be >= 1");

  const fs::path root(config.output_dir);
  std::error_code ec;
  for (const std::string& a : config.algorithms) {
    fs::create_directories(root / std::string(config.mixture.name_str()) / a, ec);
    if (ec)
      throw std::runtime_error("output_dir is not writable: " +
                               (root / std::string(config.mixture.name_str()) / a)
                                   .string() +
                               " (" + ec.message() + ")");
  }

  const std::vector<Cell> cells = config_cells(config);
  struct Unit {
    int m;
    int trial;
  };
  std::vector<Unit> units;
  for (int m : config.m_values)
    for (int t = 0; t < config.trials; ++t) units.push_back({m, t});

  std::vector<std::vector<TrialResult>> unit_results(units.size());
  std::atomic<long long> executed(0);
  std::atomic<long long> cache_hits(0);

  if (jobs == 1 || units.size() <= 1) {
    for (std::size_t u = 0; u < units.size(); ++u)
      run_unit(config, units[u].m, units[u].trial, cells, unit_results[u],
               executed, cache_hits);
  } else {
    std::atomic<std::size_t> next(0);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const int worker_count =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), units.size());
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(worker_count));
    for (int w = 0; w < worker_count; ++w) {
      workers.emplace_back([&]() {
        for (;;) {
          const std::size_t u = next.fetch_add(1);
          if (u >= units.size()) return;
          try {
            run_unit(config, units[u].m, units[u].trial, cells, unit_results[u],
                     executed, cache_hits);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  if (stats) {
    stats->executed = executed.load();
    stats->cache_hits = cache_hits.load();
  }

  std::vector<TrialResult> results;
  results.reserve(units.size() * cells.size());
  for (std::vector<TrialResult>& unit : unit_results)
    for (TrialResult& r : unit) results.push_back(std::move(r));
  return results;
}

std::vector<PlotRow> aggregate_plot_rows(const std::vector<TrialResult>& results,
                                         const std::string& metric) {
  const bool known =
      metric == "worst_envy_ratio" || metric == "fraction_envious" ||
      metric == "welfare_ratio" || metric == "success_rate" ||
      metric == "social_welfare";
  if (!known)
    throw std::invalid_argument("aggregate_plot_rows: unknown metric '" +
                                metric + "'");

  std::map<std::tuple<std::string, std::optional<int>, int>,
           std::vector<double>>
      groups;
  for (const TrialResult& r : results) {
    const auto key = std::make_tuple(r.key.algorithm, r.key.s, r.key.m);
    auto& values = groups[key];
    if (metric == "success_rate") {
      values.push_back(r.success ? 1.0 : 0.0);
      continue;
    }
    if (!r.success) continue;
    if (metric == "welfare_ratio") {
      if (r.welfare_ratio) values.push_back(*r.welfare_ratio);
    } else if (metric == "worst_envy_ratio") {
      if (r.metrics && r.metrics->worst_envy_ratio)
        values.push_back(*r.metrics->worst_envy_ratio);
    } else if (metric == "fraction_envious") {
      if (r.metrics) values.push_back(r.metrics->fraction_envious);
    } else {  // social_welfare
      if (r.metrics) values.push_back(r.metrics->social_welfare);
    }
  }

  std::vector<PlotRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, values] : groups) {
    PlotRow row;
    row.algorithm = std::get<0>(key);
    row.s = std::get<1>(key);
    row.m = std::get<2>(key);
    row.trials = static_cast<int>(values.size());
    if (values.empty()) {
      row.mean = std::numeric_limits<double>::quiet_NaN();
      row.stddev = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (double v : values) sum += v;
      row.mean = sum / static_cast<double>(values.size());
      if (values.size() <= 1) {
        row.stddev = 0.0;
      } else {
        double ss = 0.0;
        for (double v : values) ss += (v - row.mean) * (v - row.mean);
        row.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;  // map iteration is already (algorithm, s, m) with absent s first
}

void emit_plot_data(const std::vector<TrialResult>& results,
                    const std::string& metric, const std::string& path) {
  if (results.empty())
    throw std::invalid_argument("emit_plot_data: results are empty");
  const std::vector<PlotRow> rows = aggregate_plot_rows(results, metric);

  std::string csv = "m,algorithm,s,mean,stddev,trials\n";
  for (const PlotRow& row : rows) {
    csv += std::to_string(row.m);
    csv += ',';
    csv += row.algorithm;
    csv += ',';
    csv += row.s ? std::to_string(*row.s) : std::string("na");
    csv += ',';
    csv += fmt17(row.mean);
    csv += ',';
    csv += fmt17(row.stddev);
    csv += ',';
    csv += std::to_string(row.trials);
    csv += '\n';
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot create file: " + path);
  out << csv;
  if (!out.good()) throw std::runtime_error("cannot write file: " + path);
}

}  // namespace fairdiv
