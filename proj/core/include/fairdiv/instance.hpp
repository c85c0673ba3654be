#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairdiv/distributions.hpp"

namespace fairdiv {

enum class Mode { Goods, Chores };

std::string_view mode_str(Mode mode);
Mode parse_mode(std::string_view text);  // throws std::invalid_argument

// A full random fair-division instance: n agents, m items, dense row-major
// value matrix in [0,1] (utilities for goods, disutilities for chores), plus
// the per-item distribution specs the values were drawn from. Immutable.
class Instance {
 public:
  // Deterministic generation: item j draws its spec and then the n agent
  // values from the sub-stream mix_seed(seed, j). Adding agents or items
  // never perturbs the draws of existing (agent, item) cells.
  static Instance generate(int n, int m, Mode mode, const FamilyMixture& mixture,
                           std::uint64_t seed);

  // Assembles an instance from explicit parts (tests, file loading). Values
  // must lie in [0,1]; specs must cover every item.
  static Instance from_parts(int n, int m, Mode mode,
                             std::vector<DistributionSpec> item_specs,
                             std::vector<double> values, std::uint64_t seed);

  int n() const { return n_; }
  int m() const { return m_; }
  Mode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }

  double value(int agent, int item) const {
    check_indices(agent, item);
    return values_[static_cast<std::size_t>(agent) * m_ + item];
  }
  const std::vector<double>& values_flat() const { return values_; }
  const DistributionSpec& item_spec(int item) const;

  // Additive bundle value: sum of the agent's values over the bundle
  // (ascending item order); empty bundle -> 0.
  double bundle_value(int agent, const std::vector<int>& bundle) const;

  // u_i(M): the agent's value for the full item set.
  double row_total(int agent) const;

  // JSON dump {n, m, mode, seed, item_specs, values}; numbers round-trip
  // bit-exactly.
  std::string to_json() const;
  static Instance from_json(const std::string& text);

 private:
  Instance() = default;
  void check_indices(int agent, int item) const;

  int n_ = 0;
  int m_ = 0;
  Mode mode_ = Mode::Goods;
  std::uint64_t seed_ = 0;
  std::vector<DistributionSpec> item_specs_;
  std::vector<double> values_;  // row-major n x m
};

// A partition of the m items into n bundles, stored as an owner vector
// (item -> agent). Construction validates the partition, so overlap and
// omission are unrepresentable.
class Allocation {
 public:
  enum class Provenance {
    ArgMax,
    Sampling,
    EfSmall,
    PropTwoStage,
    PropLinear,
    ChoresEfSmall,
    External
  };

  Allocation(int n, std::vector<int> owner, Provenance provenance);

  // Convenience for tests and file input: explicit bundles. Throws if the
  // bundles overlap or fail to cover every item in [0, m).
  static Allocation from_bundles(int n, int m,
                                 const std::vector<std::vector<int>>& bundles,
                                 Provenance provenance);

  int n() const { return n_; }
  int m() const { return static_cast<int>(owner_.size()); }
  int owner_of(int item) const { return owner_.at(static_cast<std::size_t>(item)); }
  const std::vector<int>& owner() const { return owner_; }
  Provenance provenance() const { return provenance_; }

  std::vector<std::vector<int>> bundles() const;

  bool operator==(const Allocation& other) const {
    return n_ == other.n_ && owner_ == other.owner_;
  }

 private:
  int n_ = 0;
  std::vector<int> owner_;
  Provenance provenance_ = Provenance::External;
};

std::string_view provenance_str(Allocation::Provenance provenance);

}  // namespace fairdiv
