#include "fairdiv/instance.hpp"

#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace fairdiv {

using json = nlohmann::json;

std::string_view mode_str(Mode mode) {
  return mode == Mode::Goods ? "goods" : "chores";
}

Mode parse_mode(std::string_view text) {
  if (text == "goods") return Mode::Goods;
  if (text == "chores") return Mode::Chores;
  throw std::invalid_argument("mode: expected 'goods' or 'chores', got '" +
                              std::string(text) + "'");
}

Instance Instance::generate(int n, int m, Mode mode, const FamilyMixture& mixture,
                            std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("Instance::generate: n must be >= 1");
  if (m < 1) throw std::invalid_argument("Instance::generate: m must be >= 1");
  Instance inst;
  inst.n_ = n;
  inst.m_ = m;
  inst.mode_ = mode;
  inst.seed_ = seed;
  inst.item_specs_.reserve(static_cast<std::size_t>(m));
  inst.values_.resize(static_cast<std::size_t>(n) * m);
  for (int j = 0; j < m; ++j) {
    SeededRng item_rng(mix_seed(seed, static_cast<std::uint64_t>(j)));
    inst.item_specs_.push_back(draw_item_spec(mixture, item_rng));
    const DistributionSpec& spec = inst.item_specs_.back();
    for (int i = 0; i < n; ++i)
      inst.values_[static_cast<std::size_t>(i) * m + j] = spec.sample(item_rng);
  }
  return inst;
}

Instance Instance::from_parts(int n, int m, Mode mode,
                              std::vector<DistributionSpec> item_specs,
                              std::vector<double> values, std::uint64_t seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("Instance: n, m must be >= 1");
  if (item_specs.size() != static_cast<std::size_t>(m))
    throw std::invalid_argument("Instance: need one spec per item");
  if (values.size() != static_cast<std::size_t>(n) * m)
    throw std::invalid_argument("Instance: values must be an n x m matrix");
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("Instance: values must lie in [0,1]");
  Instance inst;
  inst.n_ = n;
  inst.m_ = m;
  inst.mode_ = mode;
  inst.seed_ = seed;
  inst.item_specs_ = std::move(item_specs);
  inst.values_ = std::move(values);
  return inst;
}

void Instance::check_indices(int agent, int item) const {
  if (agent < 0 || agent >= n_)
    throw std::out_of_range("Instance: agent index out of range");
  if (item < 0 || item >= m_)
    throw std::out_of_range("Instance: item index out of range");
}

const DistributionSpec& Instance::item_spec(int item) const {
  if (item < 0 || item >= m_)
    throw std::out_of_range("Instance: item index out of range");
  return item_specs_[static_cast<std::size_t>(item)];
}

double Instance::bundle_value(int agent, const std::vector<int>& bundle) const {
  double sum = 0.0;
  for (int item : bundle) {
    check_indices(agent, item);
    sum += values_[static_cast<std::size_t>(agent) * m_ + item];
  }
  return sum;
}

double Instance::row_total(int agent) const {
  check_indices(agent, 0);
  double sum = 0.0;
  const std::size_t base = static_cast<std::size_t>(agent) * m_;
  for (int j = 0; j < m_; ++j) sum += values_[base + j];
  return sum;
}

std::string Instance::to_json() const {
  json specs = json::array();
  for (const DistributionSpec& s : item_specs_) specs.push_back(json::parse(s.to_json()));
  json rows = json::array();
  for (int i = 0; i < n_; ++i) {
    json row = json::array();
    for (int j = 0; j < m_; ++j)
      row.push_back(values_[static_cast<std::size_t>(i) * m_ + j]);
    rows.push_back(std::move(row));
  }
  const json j = {{"n", n_},       {"m", m_},
                  {"mode", mode_str(mode_)}, {"seed", seed_},
                  {"item_specs", std::move(specs)}, {"values", std::move(rows)}};
  return j.dump();
}

Instance Instance::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("Instance: bad JSON: ") + e.what());
  }
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  const Mode mode = parse_mode(j.at("mode").get<std::string>());
  const std::uint64_t seed = j.at("seed").get<std::uint64_t>();
  std::vector<DistributionSpec> specs;
  specs.reserve(j.at("item_specs").size());
  for (const json& s : j.at("item_specs"))
    specs.push_back(DistributionSpec::from_json(s.dump()));
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * m);
  for (const json& row : j.at("values"))
    for (const json& v : row) values.push_back(v.get<double>());
  return from_parts(n, m, mode, std::move(specs), std::move(values), seed);
}

Allocation::Allocation(int n, std::vector<int> owner, Provenance provenance)
    : n_(n), owner_(std::move(owner)), provenance_(provenance) {
  if (n_ < 1) throw std::invalid_argument("Allocation: n must be >= 1");
  for (int o : owner_)
    if (o < 0 || o >= n_)
      throw std::invalid_argument("Allocation: owner index out of range");
}

Allocation Allocation::from_bundles(int n, int m,
                                    const std::vector<std::vector<int>>& bundles,
                                    Provenance provenance) {
  if (static_cast<int>(bundles.size()) != n)
    throw std::invalid_argument("Allocation: need exactly n bundles");
  std::vector<int> owner(static_cast<std::size_t>(m), -1);
  for (int i = 0; i < n; ++i) {
    for (int item : bundles[static_cast<std::size_t>(i)]) {
      if (item < 0 || item >= m)
        throw std::invalid_argument("Allocation: item index out of range");
      if (owner[static_cast<std::size_t>(item)] != -1)
        throw std::invalid_argument("Allocation: bundles overlap on item " +
                                    std::to_string(item));
      owner[static_cast<std::size_t>(item)] = i;
    }
  }
  for (int j = 0; j < m; ++j)
    if (owner[static_cast<std::size_t>(j)] == -1)
      throw std::invalid_argument("Allocation: item " + std::to_string(j) +
                                  " missing from every bundle");
  return Allocation(n, std::move(owner), provenance);
}

std::vector<std::vector<int>> Allocation::bundles() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n_));
  for (int j = 0; j < m(); ++j)
    out[static_cast<std::size_t>(owner_[static_cast<std::size_t>(j)])].push_back(j);
  return out;
}

std::string_view provenance_str(Allocation::Provenance provenance) {
  switch (provenance) {
    case Allocation::Provenance::ArgMax: return "argmax";
    case Allocation::Provenance::Sampling: return "sampling";
    case Allocation::Provenance::EfSmall: return "ef_small";
    case Allocation::Provenance::PropTwoStage: return "prop_two_stage";
    case Allocation::Provenance::PropLinear: return "prop_linear";
    case Allocation::Provenance::ChoresEfSmall: return "chores_ef_small";
    case Allocation::Provenance::External: return "external";
  }
  return "?";
}

}  // namespace fairdiv
