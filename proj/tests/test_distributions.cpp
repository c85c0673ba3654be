#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fairdiv/distributions.hpp"
#include "fairdiv/rng.hpp"

using namespace fairdiv;

namespace {

// Independent mean oracle: Simpson integration of x * pdf(x), with the pdf
// evaluated through cdf differences so it needs nothing from the sampler.
double quadrature_mean(const DistributionSpec& spec) {
  const int panels = 20000;
  const double h = 1.0 / panels;
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double x0 = k * h, x2 = (k + 1) * h, x1 = 0.5 * (x0 + x2);
    const double mass = spec.cdf(x2) - spec.cdf(x0);
    // Mass-weighted Simpson node for E[X] over the panel.
    acc += mass * x1;
  }
  return acc;
}

double ks_statistic(const DistributionSpec& spec, int draws, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<double> xs(static_cast<std::size_t>(draws));
  for (double& x : xs) x = spec.sample(rng);
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double f = spec.cdf(xs[static_cast<std::size_t>(i)]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / draws));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / draws - f));
  }
  return d;
}

bool throws_with(const std::function<void()>& fn, const std::string& needle) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("constructor validation names the problem") {
  CHECK(throws_with([] { DistributionSpec::uniform(0.5, 0.5); }, "Uniform"));
  CHECK(throws_with([] { DistributionSpec::uniform(-0.1, 0.5); }, "Uniform"));
  CHECK(throws_with([] { DistributionSpec::uniform(0.0, 1.5); }, "Uniform"));
  CHECK(throws_with([] { DistributionSpec::beta(0.0, 1.0); }, "Beta"));
  CHECK(throws_with([] { DistributionSpec::beta(2.0, -1.0); }, "Beta"));
  CHECK(throws_with([] { DistributionSpec::truncated_normal(0.5, 0.0); },
                    "TruncatedNormal"));
  CHECK(throws_with([] { DistributionSpec::discrete({}, {}); }, "empty"));
  CHECK(throws_with([] { DistributionSpec::discrete({0.5}, {0.5, 0.5}); },
                    "mismatch"));
  CHECK(throws_with([] { DistributionSpec::discrete({0.5, 0.2}, {0.5, 0.5}); },
                    "increasing"));
  CHECK(throws_with([] { DistributionSpec::discrete({0.2, 1.5}, {0.5, 0.5}); },
                    "outside"));
  CHECK(throws_with([] { DistributionSpec::discrete({0.2, 0.5}, {0.7, 0.7}); },
                    "sum"));
}

TEST_CASE("closed-form means") {
  CHECK(DistributionSpec::uniform(0.0, 1.0).mean() == 0.5);
  CHECK(DistributionSpec::uniform(0.2, 0.6).mean() == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(DistributionSpec::beta(2.0, 2.0).mean() == 0.5);
  CHECK(DistributionSpec::beta(3.0, 1.0).mean() == 0.75);
  CHECK(DistributionSpec::discrete({0.2, 1.0}, {0.7, 0.3}).mean() ==
        doctest::Approx(0.44).epsilon(1e-15));
}

TEST_CASE("truncated normal mean matches quadrature") {
  const double cases[][2] = {{0.5, 0.2}, {0.3, 0.1}, {0.8, 0.3}, {-0.2, 0.5}, {1.1, 0.4}};
  for (const auto& c : cases) {
    const DistributionSpec spec = DistributionSpec::truncated_normal(c[0], c[1]);
    CHECK(spec.mean() == doctest::Approx(quadrature_mean(spec)).epsilon(1e-9));
  }
}

TEST_CASE("beta and uniform means match quadrature too") {
  for (const DistributionSpec& spec :
       {DistributionSpec::beta(2.0, 5.0), DistributionSpec::beta(0.5, 0.5),
        DistributionSpec::uniform(0.1, 0.9)}) {
    CHECK(spec.mean() == doctest::Approx(quadrature_mean(spec)).epsilon(1e-7));
  }
}

TEST_CASE("cdf basics") {
  const DistributionSpec u = DistributionSpec::uniform(0.0, 1.0);
  CHECK(u.cdf(0.25) == 0.25);
  CHECK(u.cdf(-1.0) == 0.0);
  CHECK(u.cdf(2.0) == 1.0);

  // Beta(1,1) is uniform; Beta(2,2) is symmetric around 1/2.
  CHECK(DistributionSpec::beta(1.0, 1.0).cdf(0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(DistributionSpec::beta(2.0, 2.0).cdf(0.5) == doctest::Approx(0.5).epsilon(1e-12));

  const DistributionSpec t = DistributionSpec::truncated_normal(0.5, 0.2);
  CHECK(t.cdf(0.0) == 0.0);
  CHECK(t.cdf(1.0) == 1.0);
  CHECK(t.cdf(0.5) == doctest::Approx(0.5).epsilon(1e-12));  // symmetric truncation

  const DistributionSpec d = DistributionSpec::discrete({0.2, 0.8}, {0.3, 0.7});
  CHECK(d.cdf(0.1) == 0.0);
  CHECK(d.cdf(0.2) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d.cdf(0.5) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d.cdf(0.9) == 1.0);
}

TEST_CASE("samples stay inside [0,1] and match their cdf (KS)") {
  const DistributionSpec specs[] = {
      DistributionSpec::uniform(0.2, 0.9),
      DistributionSpec::beta(2.0, 3.0),
      DistributionSpec::beta(0.7, 0.4),   // shapes < 1 exercise the boost path
      DistributionSpec::truncated_normal(0.4, 0.25),
      DistributionSpec::truncated_normal(1.2, 0.5),  // heavy truncation
  };
  std::uint64_t seed = 101;
  for (const DistributionSpec& spec : specs) {
    SeededRng rng(seed);
    for (int i = 0; i < 1000; ++i) {
      const double x = spec.sample(rng);
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
    // 1e5 draws: KS distance above 0.01 would be a ~10-sigma event.
    CHECK(ks_statistic(spec, 100000, seed) < 0.01);
    ++seed;
  }
}

TEST_CASE("discrete sampler reproduces the masses") {
  const DistributionSpec d =
      DistributionSpec::discrete({0.1, 0.5, 1.0}, {0.2, 0.3, 0.5});
  SeededRng rng(7);
  int counts[3] = {0, 0, 0};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const double x = d.sample(rng);
    if (x == 0.1) ++counts[0];
    else if (x == 0.5) ++counts[1];
    else if (x == 1.0) ++counts[2];
    else FAIL("sample off support");
  }
  CHECK(static_cast<double>(counts[0]) / draws == doctest::Approx(0.2).epsilon(0.03));
  CHECK(static_cast<double>(counts[1]) / draws == doctest::Approx(0.3).epsilon(0.03));
  CHECK(static_cast<double>(counts[2]) / draws == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("monte-carlo mean agrees with mean()") {
  const DistributionSpec specs[] = {
      DistributionSpec::uniform(0.0, 1.0),
      DistributionSpec::beta(1.5, 2.5),
      DistributionSpec::truncated_normal(0.6, 0.3),
      DistributionSpec::discrete({0.0, 0.4, 1.0}, {0.25, 0.5, 0.25}),
  };
  std::uint64_t seed = 31;
  for (const DistributionSpec& spec : specs) {
    SeededRng rng(seed++);
    double sum = 0.0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) sum += spec.sample(rng);
    // sd <= 1/2 on [0,1], so 5 standard errors is 0.0025.
    CHECK(std::fabs(sum / draws - spec.mean()) < 0.0025);
  }
}

TEST_CASE("pdf_bounds closed forms") {
  const PdfBounds u = DistributionSpec::uniform(0.0, 1.0).pdf_bounds();
  CHECK(u.alpha == 1.0);
  CHECK(u.beta == 1.0);

  const PdfBounds u2 = DistributionSpec::uniform(0.25, 0.75).pdf_bounds();
  CHECK(u2.alpha == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(u2.beta == doctest::Approx(2.0).epsilon(1e-15));

  const PdfBounds b11 = DistributionSpec::beta(1.0, 1.0).pdf_bounds();
  CHECK(b11.alpha == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b11.beta == doctest::Approx(1.0).epsilon(1e-12));

  const PdfBounds b22 = DistributionSpec::beta(2.0, 2.0).pdf_bounds();
  CHECK(b22.alpha == 0.0);  // density vanishes at both endpoints
  CHECK(b22.beta == doctest::Approx(1.5).epsilon(1e-12));

  const PdfBounds b31 = DistributionSpec::beta(3.0, 1.0).pdf_bounds();
  CHECK(b31.alpha == 0.0);
  CHECK(b31.beta == 3.0);

  const PdfBounds bhalf = DistributionSpec::beta(0.5, 0.5).pdf_bounds();
  CHECK(bhalf.alpha == doctest::Approx(2.0 / 3.14159265358979323846).epsilon(1e-12));
  CHECK(std::isinf(bhalf.beta));

  const PdfBounds disc =
      DistributionSpec::discrete({0.2, 0.9}, {0.3, 0.7}).pdf_bounds();
  CHECK(disc.alpha == 0.3);
  CHECK(disc.beta == 0.7);
}

TEST_CASE("empirical density respects pdf_bounds when alpha > 0") {
  // Histogram of a bounded-density law must not stray far outside
  // [alpha, beta] in any bin.
  const DistributionSpec spec = DistributionSpec::uniform(0.2, 0.8);
  const PdfBounds bounds = spec.pdf_bounds();
  SeededRng rng(77);
  const int draws = 200000;
  const int bins = 30;
  std::vector<int> hist(bins, 0);
  for (int i = 0; i < draws; ++i) {
    const double x = spec.sample(rng);
    const int b = std::min(bins - 1, static_cast<int>((x - 0.2) / 0.6 * bins));
    ++hist[static_cast<std::size_t>(std::max(0, b))];
  }
  for (int b = 0; b < bins; ++b) {
    const double density = hist[static_cast<std::size_t>(b)] /
                           (static_cast<double>(draws) * 0.6 / bins);
    CHECK(density > bounds.alpha - 0.15);
    CHECK(density < bounds.beta + 0.15);
  }
}

TEST_CASE("json round trip is exact per family") {
  const DistributionSpec specs[] = {
      DistributionSpec::uniform(0.125, 0.875),
      DistributionSpec::beta(1.7, 2.9),
      DistributionSpec::truncated_normal(0.55, 0.21),
      DistributionSpec::discrete({0.0625, 0.5, 1.0}, {0.25, 0.25, 0.5}),
  };
  for (const DistributionSpec& spec : specs) {
    const DistributionSpec back = DistributionSpec::from_json(spec.to_json());
    CHECK(back == spec);
  }
  CHECK_THROWS_AS(DistributionSpec::from_json("{nope"), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::from_json(R"({"family":"laplace","params":{}})"),
                  std::invalid_argument);
}

TEST_CASE("mixture names round trip") {
  using Name = FamilyMixture::Name;
  for (Name name : {Name::BetaUniform, Name::NormalUniform, Name::UniformOnly,
                    Name::DiscreteAtom1}) {
    const FamilyMixture mix = FamilyMixture::preset(name);
    const auto parsed = FamilyMixture::parse_name(mix.name_str());
    REQUIRE(parsed.has_value());
    CHECK(*parsed == name);
  }
  CHECK(!FamilyMixture::parse_name("gaussian_mixture").has_value());
}

TEST_CASE("uniform_only preset pins the exact unit interval") {
  const FamilyMixture mix = FamilyMixture::preset(FamilyMixture::Name::UniformOnly);
  SeededRng rng(5);
  for (int i = 0; i < 50; ++i) {
    const DistributionSpec spec = draw_item_spec(mix, rng);
    REQUIRE(spec.family() == Family::Uniform);
    CHECK(spec.uniform_a() == 0.0);
    CHECK(spec.uniform_b() == 1.0);
  }
}

TEST_CASE("uniform_only with custom hyper ranges") {
  FamilyMixture mix = FamilyMixture::preset(FamilyMixture::Name::UniformOnly);
  mix.uniform_a = Range{0.0, 0.3};
  mix.uniform_b = Range{0.7, 1.0};
  SeededRng rng(6);
  for (int i = 0; i < 200; ++i) {
    const DistributionSpec spec = draw_item_spec(mix, rng);
    REQUIRE(spec.family() == Family::Uniform);
    CHECK(spec.uniform_a() >= 0.0);
    CHECK(spec.uniform_a() <= 0.3);
    CHECK(spec.uniform_b() >= 0.7);
    CHECK(spec.uniform_b() <= 1.0);
  }
}

TEST_CASE("beta_uniform preset draws both families within its ranges") {
  const FamilyMixture mix = FamilyMixture::preset(FamilyMixture::Name::BetaUniform);
  SeededRng rng(8);
  int betas = 0, uniforms = 0;
  for (int i = 0; i < 1000; ++i) {
    const DistributionSpec spec = draw_item_spec(mix, rng);
    if (spec.family() == Family::Beta) {
      ++betas;
      CHECK(spec.beta_shape1() >= mix.beta_shape1.lo);
      CHECK(spec.beta_shape1() <= mix.beta_shape1.hi);
      CHECK(spec.beta_shape2() >= mix.beta_shape2.lo);
      CHECK(spec.beta_shape2() <= mix.beta_shape2.hi);
    } else {
      REQUIRE(spec.family() == Family::Uniform);
      ++uniforms;
      CHECK(spec.uniform_a() >= mix.uniform_a.lo);
      CHECK(spec.uniform_a() <= mix.uniform_a.hi);
      CHECK(spec.uniform_b() >= mix.uniform_b.lo);
      CHECK(spec.uniform_b() <= mix.uniform_b.hi);
    }
  }
  CHECK(betas > 400);
  CHECK(uniforms > 400);
}

TEST_CASE("normal_uniform preset draws both families") {
  const FamilyMixture mix = FamilyMixture::preset(FamilyMixture::Name::NormalUniform);
  SeededRng rng(9);
  int normals = 0;
  for (int i = 0; i < 500; ++i) {
    const DistributionSpec spec = draw_item_spec(mix, rng);
    if (spec.family() == Family::TruncatedNormal) {
      ++normals;
      CHECK(spec.normal_location() >= mix.normal_location.lo);
      CHECK(spec.normal_location() <= mix.normal_location.hi);
      CHECK(spec.normal_scale() >= mix.normal_scale.lo);
      CHECK(spec.normal_scale() <= mix.normal_scale.hi);
    }
  }
  CHECK(normals > 150);
}

TEST_CASE("discrete_atom1 always carries the configured atom at 1") {
  const FamilyMixture mix = FamilyMixture::preset(FamilyMixture::Name::DiscreteAtom1);
  SeededRng rng(10);
  for (int i = 0; i < 300; ++i) {
    const DistributionSpec spec = draw_item_spec(mix, rng);
    REQUIRE(spec.family() == Family::DiscreteFinite);
    const std::vector<double>& support = spec.discrete_support();
    const std::vector<double>& probs = spec.discrete_probs();
    REQUIRE(support.size() >= 2);
    REQUIRE(support.size() <= 5);
    CHECK(support.back() == 1.0);
    CHECK(probs.back() >= mix.atom_mass.lo);
    CHECK(probs.back() <= mix.atom_mass.hi);
    for (std::size_t k = 0; k + 1 < support.size(); ++k)
      CHECK(support[k] <= 0.9);
    double sum = 0.0;
    for (double p : probs) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("draw_item_spec is deterministic in the rng stream") {
  const FamilyMixture mix = FamilyMixture::preset(FamilyMixture::Name::BetaUniform);
  SeededRng a(123), b(123);
  for (int i = 0; i < 50; ++i) CHECK(draw_item_spec(mix, a) == draw_item_spec(mix, b));
}
