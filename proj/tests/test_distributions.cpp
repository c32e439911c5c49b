#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mixshift/distributions.hpp"
#include "mixshift/errors.hpp"
#include "oracles.hpp"

using namespace mixshift;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

oracle::Fam to_oracle(Family f) {
  switch (f) {
    case Family::Normal: return oracle::Fam::Normal;
    case Family::Logistic: return oracle::Fam::Logistic;
    case Family::Laplace: return oracle::Fam::Laplace;
  }
  return oracle::Fam::Normal;
}

}  // namespace

TEST_CASE("natural scales make scale_sigma the exact SD") {
  CHECK(natural_scale(FamilySpec{Family::Normal, 0.0, 2.5}) == 2.5);
  CHECK_THAT(natural_scale(FamilySpec{Family::Logistic, 0.0, 1.0}),
             WithinRel(0.55132889542179204776, 1e-15));  // sqrt(3)/pi
  CHECK_THAT(natural_scale(FamilySpec{Family::Laplace, 0.0, 1.0}),
             WithinRel(0.70710678118654752440, 1e-15));  // 1/sqrt(2)
  CHECK_THAT(natural_scale(FamilySpec{Family::Logistic, 0.0, 3.0}),
             WithinRel(3.0 * 0.55132889542179204776, 1e-15));
  CHECK_THROWS_AS(natural_scale(FamilySpec{Family::Normal, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(natural_scale(FamilySpec{Family::Normal, 0.0, -1.0}), DomainError);
}

TEST_CASE("theoretical moments of F") {
  const MomentSet n01 = theoretical_moments_F(FamilySpec{Family::Normal, 0.0, 1.0});
  CHECK(n01.mean == 0.0);
  CHECK(n01.var == 1.0);
  CHECK(n01.c3 == 0.0);
  CHECK(n01.c4 == 3.0);

  const MomentSet lg = theoretical_moments_F(FamilySpec{Family::Logistic, 0.0, 1.0});
  CHECK_THAT(lg.c4, WithinRel(4.2, 1e-15));

  const MomentSet lp = theoretical_moments_F(FamilySpec{Family::Laplace, 0.0, 1.0});
  CHECK_THAT(lp.c4, WithinRel(6.0, 1e-15));

  const MomentSet shifted = theoretical_moments_F(FamilySpec{Family::Normal, 2.0, 3.0});
  CHECK(shifted.mean == 2.0);
  CHECK(shifted.var == 9.0);
  CHECK(shifted.c3 == 0.0);
  CHECK_THAT(shifted.c4, WithinRel(243.0, 1e-15));
}

TEST_CASE("mixture moment propagation on the hand-checked case") {
  const MomentSet f{0.0, 1.0, 0.0, 3.0};
  const MomentSet g = mixture_moments(f, MixtureParams{0.5, 2.0});
  CHECK_THAT(g.mean, WithinAbs(1.0, 1e-15));
  CHECK_THAT(g.var, WithinAbs(2.0, 1e-15));
  CHECK_THAT(g.c3, WithinAbs(0.0, 1e-15));
  CHECK_THAT(g.c4, WithinAbs(10.0, 1e-14));
}

TEST_CASE("mixture moments: boundary and symmetry structure") {
  const MomentSet f{1.5, 4.0, 0.0, 4.2 * 16.0};
  SECTION("theta = 1 is a pure shift: only the mean moves") {
    const MomentSet g = mixture_moments(f, MixtureParams{1.0, 3.0});
    CHECK(g.mean == 4.5);
    CHECK(g.var == f.var);
    CHECK(g.c3 == f.c3);
    CHECK(g.c4 == f.c4);
  }
  SECTION("delta = 0 changes nothing") {
    const MomentSet g = mixture_moments(f, MixtureParams{0.7, 0.0});
    CHECK(g.mean == f.mean);
    CHECK(g.var == f.var);
    CHECK(g.c3 == f.c3);
    CHECK(g.c4 == f.c4);
  }
  SECTION("theta = 1/2 keeps the mixture symmetric") {
    const MomentSet g = mixture_moments(f, MixtureParams{0.5, 2.7});
    CHECK(g.c3 == f.c3);
  }
  SECTION("skew sign follows 1 - 2 theta") {
    CHECK(mixture_moments(f, MixtureParams{0.2, 2.0}).c3 > f.c3);
    CHECK(mixture_moments(f, MixtureParams{0.8, 2.0}).c3 < f.c3);
  }
  SECTION("even moments never decrease") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double th = std::clamp(unif(rng), 1e-3, 1.0);
      const double de = 5.0 * unif(rng);
      const MomentSet g = mixture_moments(f, MixtureParams{th, de});
      REQUIRE(g.var >= f.var);
      REQUIRE(g.c4 >= f.c4);
      REQUIRE(g.c4 >= g.var * g.var);  // kurtosis lower bound survives mixing
    }
  }
}

TEST_CASE("mixture moments agree with the raw-moment oracle") {
  std::mt19937_64 rng(42424242);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Family fams[] = {Family::Normal, Family::Logistic, Family::Laplace};
  for (int i = 0; i < 100; ++i) {
    const Family fam = fams[i % 3];
    const double mu = -2.0 + 4.0 * unif(rng);
    const double sigma = 0.5 + 2.5 * unif(rng);
    const double th = std::clamp(unif(rng), 1e-3, 1.0);
    const double de = 5.0 * unif(rng);

    const MomentSet f = theoretical_moments_F(FamilySpec{fam, mu, sigma});
    const MomentSet g = mixture_moments(f, MixtureParams{th, de});
    const oracle::Mom8 ref = oracle::mixture_central(to_oracle(fam), mu, sigma, th, de);
    const double ref_mean = (1.0 - th) * mu + th * (mu + de);

    REQUIRE_THAT(g.mean, WithinAbs(ref_mean, 1e-12 * (1.0 + std::abs(ref_mean))));
    REQUIRE_THAT(g.var, WithinRel(ref[2], 1e-12));
    REQUIRE_THAT(g.c3, WithinAbs(ref[3], 1e-12 * (1.0 + std::abs(ref[3]))));
    REQUIRE_THAT(g.c4, WithinRel(ref[4], 1e-12));
  }
}

TEST_CASE("mixture parameter validation") {
  CHECK_THROWS_AS(validate(MixtureParams{0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(MixtureParams{-0.2, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(MixtureParams{1.1, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(MixtureParams{0.5, -0.5}), DomainError);
  CHECK_NOTHROW(validate(MixtureParams{1.0, 0.0}));
  CHECK(MixtureParams{0.5, 2.0}.delta_avg() == 1.0);
}

TEST_CASE("family quantiles invert at the median and are monotone") {
  for (Family fam : {Family::Normal, Family::Logistic, Family::Laplace}) {
    const FamilySpec spec{fam, 1.25, 2.0};
    CHECK_THAT(family_quantile(spec, 0.5), WithinAbs(1.25, 1e-12));
    double prev = family_quantile(spec, 0.001);
    for (int i = 1; i <= 200; ++i) {
      const double u = 0.001 + 0.998 * i / 200.0;
      const double q = family_quantile(spec, u);
      REQUIRE(q > prev);
      prev = q;
    }
    // symmetry of all three families about the location
    CHECK_THAT(family_quantile(spec, 0.2) - 1.25, WithinAbs(-(family_quantile(spec, 0.8) - 1.25), 1e-12));
  }
}

TEST_CASE("samplers are deterministic and reject n = 0") {
  const FamilySpec spec{Family::Laplace, 0.0, 1.0};
  CHECK_THROWS_AS(sample_control(spec, 0, Seed{1, 0}), EmptySampleError);
  CHECK_THROWS_AS(sample_treatment(spec, MixtureParams{0.5, 1.0}, 0, Seed{1, 0}), EmptySampleError);
  CHECK_THROWS_AS(sample_treatment(spec, MixtureParams{0.0, 1.0}, 5, Seed{1, 0}), DomainError);

  const auto a = sample_control(spec, 64, Seed{9, 4});
  const auto b = sample_control(spec, 64, Seed{9, 4});
  REQUIRE(a == b);
  const auto c = sample_treatment(spec, MixtureParams{0.5, 1.0}, 64, Seed{9, 4});
  const auto d = sample_treatment(spec, MixtureParams{0.5, 1.0}, 64, Seed{9, 4});
  REQUIRE(c == d);
  CHECK(a != c);  // same stream, different consumption pattern
}

TEST_CASE("control sample moments match theory at Monte Carlo scale") {
  const std::size_t n = 1'000'000;
  int fam_i = 0;
  for (Family fam : {Family::Normal, Family::Logistic, Family::Laplace}) {
    const FamilySpec spec{fam, 0.5, 2.0};
    const auto xs = sample_control(spec, n, Seed{314159, static_cast<std::uint64_t>(fam_i++)});
    const oracle::Mom8 cen = oracle::family_central(to_oracle(fam), 2.0);
    const double se_mean = std::sqrt(oracle::var_mean(cen, n));
    const double se_m2 = std::sqrt(oracle::var_m2(cen, n));
    REQUIRE_THAT(oracle::mean_of(xs), WithinAbs(0.5, 5.0 * se_mean));
    REQUIRE_THAT(oracle::central_moment(xs, 2), WithinAbs(4.0, 5.0 * se_m2));
  }
}

TEST_CASE("treatment sampler realizes the mixture moments") {
  const FamilySpec spec{Family::Normal, 0.0, 1.0};
  const MixtureParams mix{0.5, 2.0};
  const std::size_t n = 1'000'000;
  const auto ys = sample_treatment(spec, mix, n, Seed{2718281, 0});
  const oracle::Mom8 cen = oracle::mixture_central(oracle::Fam::Normal, 0.0, 1.0, 0.5, 2.0);
  REQUIRE_THAT(oracle::mean_of(ys), WithinAbs(1.0, 5.0 * std::sqrt(oracle::var_mean(cen, n))));
  REQUIRE_THAT(oracle::central_moment(ys, 2), WithinAbs(2.0, 5.0 * std::sqrt(oracle::var_m2(cen, n))));
  REQUIRE_THAT(oracle::central_moment(ys, 3), WithinAbs(0.0, 5.0 * std::sqrt(oracle::var_m3(cen, n))));
  REQUIRE_THAT(oracle::central_moment(ys, 4), WithinAbs(10.0, 5.0 * std::sqrt(oracle::var_m4(cen, n))));
}

TEST_CASE("delta = 0 treatment draws are distributed as F") {
  const FamilySpec spec{Family::Logistic, 1.0, 1.5};
  const std::size_t n = 100'000;
  auto xs = sample_control(spec, n, Seed{555, 0});
  auto ys = sample_treatment(spec, MixtureParams{0.7, 0.0}, n, Seed{555, 1});
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  CHECK(oracle::ks_stat(xs, ys) < oracle::ks_crit_1pct(n, n));
}

TEST_CASE("theta = 1 treatment is a pure location shift of F") {
  const FamilySpec spec{Family::Laplace, 0.0, 1.0};
  const std::size_t n = 100'000;
  auto xs = sample_control(spec, n, Seed{556, 0});
  auto ys = sample_treatment(spec, MixtureParams{1.0, 2.5}, n, Seed{556, 1});
  for (auto& y : ys) y -= 2.5;
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  CHECK(oracle::ks_stat(xs, ys) < oracle::ks_crit_1pct(n, n));
}
