#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairdiv/rng.hpp"

namespace fairdiv {

enum class Family { Uniform, Beta, TruncatedNormal, DiscreteFinite };

// Density (or, for DiscreteFinite, per-point mass) bounds over the support.
// alpha == 0 signals that the law is not bounded away from zero anywhere on
// its support, i.e. it does not qualify for the threshold formulas that
// divide by alpha. beta may be +infinity (density blow-up at an endpoint).
struct PdfBounds {
  double alpha = 0.0;
  double beta = 0.0;
};

// A per-item utility law on [0, 1]. Immutable after construction; all
// parameters are validated eagerly so sampling can never fail.
class DistributionSpec {
 public:
  static DistributionSpec uniform(double a, double b);
  static DistributionSpec beta(double shape1, double shape2);
  static DistributionSpec truncated_normal(double location, double scale);
  static DistributionSpec discrete(std::vector<double> support,
                                   std::vector<double> probs);

  Family family() const { return family_; }
  // Family-specific parameter accessors (throw std::logic_error on family
  // mismatch).
  double uniform_a() const;
  double uniform_b() const;
  double beta_shape1() const;
  double beta_shape2() const;
  double normal_location() const;
  double normal_scale() const;
  const std::vector<double>& discrete_support() const;
  const std::vector<double>& discrete_probs() const;

  // One draw from the law; always lands in the support.
  double sample(SeededRng& rng) const;

  // Analytic mean (closed form for every family; the truncated normal uses
  // the standard phi/Phi ratio of the renormalized density).
  double mean() const;

  // CDF at x; used by goodness-of-fit checks and by inverse-CDF sampling.
  double cdf(double x) const;

  PdfBounds pdf_bounds() const;

  // JSON object {"family": ..., "params": {...}}; round-trips bit-exactly.
  std::string to_json() const;
  static DistributionSpec from_json(const std::string& text);

  bool operator==(const DistributionSpec& other) const;

 private:
  DistributionSpec() = default;

  Family family_ = Family::Uniform;
  // Uniform: p0 = a, p1 = b. Beta: p0 = shape1, p1 = shape2.
  // TruncatedNormal: p0 = location, p1 = scale.
  double p0_ = 0.0;
  double p1_ = 1.0;
  std::vector<double> support_;  // DiscreteFinite only
  std::vector<double> probs_;    // DiscreteFinite only
};

// Closed interval from which a hyper-parameter is drawn uniformly. lo == hi
// pins the parameter exactly.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double draw(SeededRng& rng) const { return lo + (hi - lo) * rng.next_double(); }
};

// A named family mixture: per item, a fresh DistributionSpec is drawn with
// parameters resampled independently from the ranges below. The defaults are
// the engine-wide presets; custom ranges may be set after preset().
struct FamilyMixture {
  enum class Name { BetaUniform, NormalUniform, UniformOnly, DiscreteAtom1 };

  Name name = Name::UniformOnly;

  // beta_uniform: with probability 1/2 a Beta(shape1, shape2) law, else a
  // Uniform(a, b) law.
  Range beta_shape1{1.0, 4.5};
  Range beta_shape2{1.2, 2.5};
  // normal_uniform: with probability 1/2 a TruncatedNormal, else a Uniform.
  Range normal_location{0.3, 0.8};
  Range normal_scale{0.1, 0.3};
  // Uniform component of all mixtures. uniform_only pins these to the exact
  // unit interval.
  Range uniform_a{0.2, 0.6};
  Range uniform_b{0.7, 1.0};
  // discrete_atom1: support always contains the point 1; the mass placed on
  // it is drawn from atom_mass (so atom_mass.lo is the configured floor).
  Range atom_mass{0.2, 0.6};
  int support_points_min = 2;
  int support_points_max = 5;

  static FamilyMixture preset(Name name);
  static std::optional<Name> parse_name(std::string_view text);
  std::string_view name_str() const;
};

// Draws the distribution spec for one item. Deterministic given the rng
// state; instance generation hands every item its own sub-stream.
DistributionSpec draw_item_spec(const FamilyMixture& mixture, SeededRng& rng);

}  // namespace fairdiv
