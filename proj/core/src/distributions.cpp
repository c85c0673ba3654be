#include "fairdiv/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fairdiv {
namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void invalid(const std::string& what) {
  throw std::invalid_argument("DistributionSpec: " + what);
}

// ---- standard normal helpers -------------------------------------------

double normal_pdf(double z) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

// Inverse standard normal CDF: Acklam's rational approximation refined by one
// Halley step against erfc, giving ~1e-15 absolute accuracy on (0, 1).
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley refinement: solve normal_cdf(x) - p = 0.
  const double e = normal_cdf(x) - p;
  const double u = e / normal_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

// ---- beta helpers --------------------------------------------------------

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_density(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) invalid("beta_density expects x in (0,1)");
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
                  log_beta(a, b));
}

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h;
}

double beta_reg_inc(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

// Marsaglia-Tsang gamma sampler, shape >= 1. Uses our deterministic normal
// quantile rather than std::normal_distribution.
double gamma_shape_ge1(double shape, SeededRng& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double z = normal_quantile(rng.next_open01());
    const double t = 1.0 + c * z;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.next_open01();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double gamma_sample(double shape, SeededRng& rng) {
  if (shape >= 1.0) return gamma_shape_ge1(shape, rng);
  // Boost the shape and correct with u^(1/shape).
  const double g = gamma_shape_ge1(shape + 1.0, rng);
  return g * std::pow(rng.next_open01(), 1.0 / shape);
}

// Truncated-to-[0,1] normal bookkeeping shared by sample/mean/cdf.
struct TruncNorm {
  double mu, sigma, z0, z1, cdf0, cdf1, mass;
  TruncNorm(double location, double scale)
      : mu(location),
        sigma(scale),
        z0((0.0 - location) / scale),
        z1((1.0 - location) / scale),
        cdf0(normal_cdf(z0)),
        cdf1(normal_cdf(z1)),
        mass(cdf1 - cdf0) {}
};

}  // namespace

// ---- construction / validation -------------------------------------------

DistributionSpec DistributionSpec::uniform(double a, double b) {
  if (!(std::isfinite(a) && std::isfinite(b))) invalid("Uniform: non-finite bounds");
  if (!(0.0 <= a && a < b && b <= 1.0))
    invalid("Uniform: need 0 <= a < b <= 1");
  DistributionSpec s;
  s.family_ = Family::Uniform;
  s.p0_ = a;
  s.p1_ = b;
  return s;
}

DistributionSpec DistributionSpec::beta(double shape1, double shape2) {
  if (!(std::isfinite(shape1) && std::isfinite(shape2)))
    invalid("Beta: non-finite shape");
  if (!(shape1 > 0.0 && shape2 > 0.0)) invalid("Beta: shapes must be positive");
  DistributionSpec s;
  s.family_ = Family::Beta;
  s.p0_ = shape1;
  s.p1_ = shape2;
  return s;
}

DistributionSpec DistributionSpec::truncated_normal(double location, double scale) {
  if (!std::isfinite(location)) invalid("TruncatedNormal: non-finite location");
  if (!(std::isfinite(scale) && scale > 0.0))
    invalid("TruncatedNormal: scale must be positive");
  if (TruncNorm(location, scale).mass <= 0.0)
    invalid("TruncatedNormal: no probability mass falls inside [0,1]");
  DistributionSpec s;
  s.family_ = Family::TruncatedNormal;
  s.p0_ = location;
  s.p1_ = scale;
  return s;
}

DistributionSpec DistributionSpec::discrete(std::vector<double> support,
                                            std::vector<double> probs) {
  if (support.empty()) invalid("DiscreteFinite: empty support");
  if (support.size() != probs.size())
    invalid("DiscreteFinite: support/probs size mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (!(std::isfinite(support[k]) && 0.0 <= support[k] && support[k] <= 1.0))
      invalid("DiscreteFinite: support point outside [0,1]");
    if (k > 0 && !(support[k] > support[k - 1]))
      invalid("DiscreteFinite: support must be strictly increasing");
    if (!(std::isfinite(probs[k]) && probs[k] >= 0.0))
      invalid("DiscreteFinite: negative probability");
    sum += probs[k];
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    invalid("DiscreteFinite: probabilities must sum to 1 within 1e-12");
  DistributionSpec s;
  s.family_ = Family::DiscreteFinite;
  s.support_ = std::move(support);
  s.probs_ = std::move(probs);
  return s;
}

// ---- accessors -------------------------------------------------------------

namespace {
void require_family(Family have, Family want, const char* accessor) {
  if (have != want)
    throw std::logic_error(std::string("DistributionSpec: ") + accessor +
                           " called on wrong family");
}
}  // namespace

double DistributionSpec::uniform_a() const {
  require_family(family_, Family::Uniform, "uniform_a");
  return p0_;
}
double DistributionSpec::uniform_b() const {
  require_family(family_, Family::Uniform, "uniform_b");
  return p1_;
}
double DistributionSpec::beta_shape1() const {
  require_family(family_, Family::Beta, "beta_shape1");
  return p0_;
}
double DistributionSpec::beta_shape2() const {
  require_family(family_, Family::Beta, "beta_shape2");
  return p1_;
}
double DistributionSpec::normal_location() const {
  require_family(family_, Family::TruncatedNormal, "normal_location");
  return p0_;
}
double DistributionSpec::normal_scale() const {
  require_family(family_, Family::TruncatedNormal, "normal_scale");
  return p1_;
}
const std::vector<double>& DistributionSpec::discrete_support() const {
  require_family(family_, Family::DiscreteFinite, "discrete_support");
  return support_;
}
const std::vector<double>& DistributionSpec::discrete_probs() const {
  require_family(family_, Family::DiscreteFinite, "discrete_probs");
  return probs_;
}

// ---- sampling ---------------------------------------------------------------

double DistributionSpec::sample(SeededRng& rng) const {
  switch (family_) {
    case Family::Uniform:
      return p0_ + (p1_ - p0_) * rng.next_double();
    case Family::Beta: {
      const double g1 = gamma_sample(p0_, rng);
      const double g2 = gamma_sample(p1_, rng);
      const double x = g1 / (g1 + g2);
      // Guard against denormal round-off pushing outside the support.
      return std::min(1.0, std::max(0.0, x));
    }
    case Family::TruncatedNormal: {
      const TruncNorm t(p0_, p1_);
      const double u = t.cdf0 + rng.next_open01() * t.mass;
      const double x = t.mu + t.sigma * normal_quantile(u);
      return std::min(1.0, std::max(0.0, x));
    }
    case Family::DiscreteFinite: {
      const double u = rng.next_double();
      double cum = 0.0;
      for (std::size_t k = 0; k + 1 < support_.size(); ++k) {
        cum += probs_[k];
        if (u < cum) return support_[k];
      }
      return support_.back();
    }
  }
  invalid("unknown family");
}

// ---- mean -------------------------------------------------------------------

double DistributionSpec::mean() const {
  switch (family_) {
    case Family::Uniform:
      return 0.5 * (p0_ + p1_);
    case Family::Beta:
      return p0_ / (p0_ + p1_);
    case Family::TruncatedNormal: {
      const TruncNorm t(p0_, p1_);
      return t.mu + t.sigma * (normal_pdf(t.z0) - normal_pdf(t.z1)) / t.mass;
    }
    case Family::DiscreteFinite: {
      double m = 0.0;
      for (std::size_t k = 0; k < support_.size(); ++k) m += support_[k] * probs_[k];
      return m;
    }
  }
  invalid("unknown family");
}

// ---- cdf --------------------------------------------------------------------

double DistributionSpec::cdf(double x) const {
  switch (family_) {
    case Family::Uniform:
      if (x <= p0_) return 0.0;
      if (x >= p1_) return 1.0;
      return (x - p0_) / (p1_ - p0_);
    case Family::Beta:
      return beta_reg_inc(p0_, p1_, x);
    case Family::TruncatedNormal: {
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      const TruncNorm t(p0_, p1_);
      return (normal_cdf((x - t.mu) / t.sigma) - t.cdf0) / t.mass;
    }
    case Family::DiscreteFinite: {
      double cum = 0.0;
      for (std::size_t k = 0; k < support_.size(); ++k) {
        if (support_[k] > x) break;
        cum += probs_[k];
      }
      return std::min(1.0, cum);
    }
  }
  invalid("unknown family");
}

// ---- pdf bounds ---------------------------------------------------------------

PdfBounds DistributionSpec::pdf_bounds() const {
  switch (family_) {
    case Family::Uniform: {
      const double d = 1.0 / (p1_ - p0_);
      return {d, d};
    }
    case Family::Beta: {
      const double a = p0_, b = p1_;
      // Density limits at the two endpoints of (0,1).
      const double at0 = a < 1.0 ? kInf : (a == 1.0 ? b : 0.0);
      const double at1 = b < 1.0 ? kInf : (b == 1.0 ? a : 0.0);
      double lo = std::min(at0, at1);
      double hi = std::max(at0, at1);
      // Interior extremum exists iff both shapes are on the same side of 1:
      // a mode when both > 1, an antimode when both < 1.
      if ((a - 1.0) * (b - 1.0) > 0.0) {
        const double x_star = (a - 1.0) / (a + b - 2.0);
        const double f_star = beta_density(x_star, a, b);
        lo = std::min(lo, f_star);
        hi = std::max(hi, f_star);
      }
      return {lo, hi};
    }
    case Family::TruncatedNormal: {
      const TruncNorm t(p0_, p1_);
      const double scale = 1.0 / (t.sigma * t.mass);
      const double f0 = normal_pdf(t.z0) * scale;
      const double f1 = normal_pdf(t.z1) * scale;
      double hi = std::max(f0, f1);
      if (0.0 < t.mu && t.mu < 1.0) hi = normal_pdf(0.0) * scale;  // peak inside
      return {std::min(f0, f1), hi};
    }
    case Family::DiscreteFinite: {
      double lo = kInf, hi = 0.0;
      for (double p : probs_) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
      return {lo, hi};
    }
  }
  invalid("unknown family");
}

// ---- JSON -----------------------------------------------------------------------

std::string DistributionSpec::to_json() const {
  json j;
  switch (family_) {
    case Family::Uniform:
      j = {{"family", "uniform"}, {"params", {{"a", p0_}, {"b", p1_}}}};
      break;
    case Family::Beta:
      j = {{"family", "beta"}, {"params", {{"shape1", p0_}, {"shape2", p1_}}}};
      break;
    case Family::TruncatedNormal:
      j = {{"family", "truncated_normal"},
           {"params", {{"location", p0_}, {"scale", p1_}}}};
      break;
    case Family::DiscreteFinite:
      j = {{"family", "discrete_finite"},
           {"params", {{"support", support_}, {"probs", probs_}}}};
      break;
  }
  return j.dump();
}

DistributionSpec DistributionSpec::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("bad JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("family") || !j.contains("params"))
    invalid("JSON must be an object with 'family' and 'params'");
  const std::string fam = j.at("family").get<std::string>();
  const json& p = j.at("params");
  if (fam == "uniform")
    return uniform(p.at("a").get<double>(), p.at("b").get<double>());
  if (fam == "beta")
    return beta(p.at("shape1").get<double>(), p.at("shape2").get<double>());
  if (fam == "truncated_normal")
    return truncated_normal(p.at("location").get<double>(),
                            p.at("scale").get<double>());
  if (fam == "discrete_finite")
    return discrete(p.at("support").get<std::vector<double>>(),
                    p.at("probs").get<std::vector<double>>());
  invalid("unknown family '" + fam + "'");
}

bool DistributionSpec::operator==(const DistributionSpec& other) const {
  return family_ == other.family_ && p0_ == other.p0_ && p1_ == other.p1_ &&
         support_ == other.support_ && probs_ == other.probs_;
}

// ---- mixtures --------------------------------------------------------------------

FamilyMixture FamilyMixture::preset(Name name) {
  FamilyMixture m;
  m.name = name;
  if (name == Name::UniformOnly) {
    // The exact unit interval: every item is Uniform(0, 1).
    m.uniform_a = {0.0, 0.0};
    m.uniform_b = {1.0, 1.0};
  }
  return m;
}

std::optional<FamilyMixture::Name> FamilyMixture::parse_name(std::string_view text) {
  if (text == "beta_uniform") return Name::BetaUniform;
  if (text == "normal_uniform") return Name::NormalUniform;
  if (text == "uniform_only") return Name::UniformOnly;
  if (text == "discrete_atom1") return Name::DiscreteAtom1;
  return std::nullopt;
}

std::string_view FamilyMixture::name_str() const {
  switch (name) {
    case Name::BetaUniform: return "beta_uniform";
    case Name::NormalUniform: return "normal_uniform";
    case Name::UniformOnly: return "uniform_only";
    case Name::DiscreteAtom1: return "discrete_atom1";
  }
  return "?";
}

namespace {

DistributionSpec draw_uniform_component(const FamilyMixture& mixture,
                                        SeededRng& rng) {
  const double a = mixture.uniform_a.draw(rng);
  const double b = mixture.uniform_b.draw(rng);
  if (!(a < b))
    throw std::invalid_argument(
        "FamilyMixture: uniform ranges drew a >= b; keep uniform_a.hi below "
        "uniform_b.lo");
  return DistributionSpec::uniform(a, b);
}

DistributionSpec draw_discrete_atom1(const FamilyMixture& mixture, SeededRng& rng) {
  if (mixture.support_points_min < 2 ||
      mixture.support_points_max < mixture.support_points_min)
    throw std::invalid_argument("FamilyMixture: bad support point range");
  const int k = mixture.support_points_min +
                static_cast<int>(rng.next_below(static_cast<std::uint64_t>(
                    mixture.support_points_max - mixture.support_points_min + 1)));
  const double atom = mixture.atom_mass.draw(rng);
  if (!(atom > 0.0 && atom < 1.0))
    throw std::invalid_argument("FamilyMixture: atom mass must lie in (0,1)");
  // k-1 interior support points kept clear of the atom at 1.
  std::vector<double> pts(static_cast<std::size_t>(k) - 1);
  for (double& v : pts) v = 0.9 * rng.next_double();
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i)  // continuous draws collide only
    if (pts[i] == pts[i - 1]) pts[i] = std::nextafter(pts[i], 1.0);  // in theory
  // Split the remaining mass by normalized exponential weights.
  std::vector<double> w(pts.size());
  double wsum = 0.0;
  for (double& x : w) {
    x = -std::log(rng.next_open01());
    wsum += x;
  }
  std::vector<double> support(pts);
  support.push_back(1.0);
  std::vector<double> probs(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) probs[i] = (1.0 - atom) * w[i] / wsum;
  probs.push_back(atom);
  return DistributionSpec::discrete(std::move(support), std::move(probs));
}

}  // namespace

DistributionSpec draw_item_spec(const FamilyMixture& mixture, SeededRng& rng) {
  switch (mixture.name) {
    case FamilyMixture::Name::UniformOnly:
      return draw_uniform_component(mixture, rng);
    case FamilyMixture::Name::BetaUniform: {
      if (rng.next_double() < 0.5) {
        const double s1 = mixture.beta_shape1.draw(rng);
        const double s2 = mixture.beta_shape2.draw(rng);
        return DistributionSpec::beta(s1, s2);
      }
      return draw_uniform_component(mixture, rng);
    }
    case FamilyMixture::Name::NormalUniform: {
      if (rng.next_double() < 0.5) {
        const double loc = mixture.normal_location.draw(rng);
        const double scale = mixture.normal_scale.draw(rng);
        return DistributionSpec::truncated_normal(loc, scale);
      }
      return draw_uniform_component(mixture, rng);
    }
    case FamilyMixture::Name::DiscreteAtom1:
      return draw_discrete_atom1(mixture, rng);
  }
  throw std::invalid_argument("FamilyMixture: unknown mixture name");
}

}  // namespace fairdiv
