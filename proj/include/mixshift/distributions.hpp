#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mixshift/errors.hpp"
#include "mixshift/normal.hpp"
#include "mixshift/rng.hpp"

namespace mixshift {

enum class Family { Normal, Logistic, Laplace };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Normal: return "normal";
    case Family::Logistic: return "logistic";
    case Family::Laplace: return "laplace";
  }
  return "?";
}

// Control law F.  scale_sigma is the standard deviation of F, not the natural
// scale parameter; conversion happens internally so that var(F) == sigma^2
// exactly for every family.
struct FamilySpec {
  Family family = Family::Normal;
  double location = 0.0;     // mu_X
  double scale_sigma = 1.0;  // sigma_X (> 0)
};

// Natural scale giving unit ratio between scale_sigma and the SD:
// Normal sigma, Logistic s = sigma*sqrt(3)/pi, Laplace b = sigma/sqrt(2).
inline double natural_scale(const FamilySpec& spec) {
  if (!(spec.scale_sigma > 0.0)) throw DomainError("FamilySpec: scale_sigma must be > 0");
  switch (spec.family) {
    case Family::Normal: return spec.scale_sigma;
    case Family::Logistic: return spec.scale_sigma * 0.55132889542179204776;  // sqrt(3)/pi
    case Family::Laplace: return spec.scale_sigma * 0.70710678118654752440;   // 1/sqrt(2)
  }
  throw DomainError("FamilySpec: unknown family");
}

// The estimand: a theta-fraction of treated subjects shifts by delta.
struct MixtureParams {
  double theta = 1.0;  // in (0,1]
  double delta = 0.0;  // >= 0, response units

  double delta_avg() const { return theta * delta; }
};

inline void validate(const MixtureParams& mix) {
  if (!(mix.theta > 0.0 && mix.theta <= 1.0)) throw DomainError("MixtureParams: theta must lie in (0,1]");
  if (!(mix.delta >= 0.0)) throw DomainError("MixtureParams: delta must be >= 0");
}

// First four moments; the currency of every variance formula here.
struct MomentSet {
  double mean = 0.0;
  double var = 0.0;  // >= 0
  double c3 = 0.0;   // third central moment
  double c4 = 0.0;   // fourth central moment (>= var^2)
};

// Quantile of F at u in (0,1); all three families sample by inversion so a
// given Seed reproduces bit-identically on every platform.
inline double family_quantile(const FamilySpec& spec, double u) {
  const double s = natural_scale(spec);
  switch (spec.family) {
    case Family::Normal:
      return spec.location + s * std_normal_quantile(u);
    case Family::Logistic:
      return spec.location + s * std::log(u / (1.0 - u));
    case Family::Laplace:
      return u < 0.5 ? spec.location + s * std::log(2.0 * u)
                     : spec.location - s * std::log(2.0 * (1.0 - u));
  }
  throw DomainError("FamilySpec: unknown family");
}

inline std::vector<double> sample_control(const FamilySpec& spec, std::size_t n, Seed seed) {
  if (n == 0) throw EmptySampleError("sample_control: n must be >= 1");
  Xoshiro256pp gen(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = family_quantile(spec, gen.uniform01());
  return out;
}

// Y = X + Z*delta with Z ~ Bernoulli(theta) independent of X; componentwise
// sampling is exact for the shift mixture.  Two uniforms per draw, X first.
inline std::vector<double> sample_treatment(const FamilySpec& spec, const MixtureParams& mix,
                                            std::size_t n, Seed seed) {
  if (n == 0) throw EmptySampleError("sample_treatment: n must be >= 1");
  validate(mix);
  Xoshiro256pp gen(seed);
  std::vector<double> out(n);
  for (auto& y : out) {
    const double x = family_quantile(spec, gen.uniform01());
    const bool z = gen.uniform01() < mix.theta;
    y = z ? x + mix.delta : x;
  }
  return out;
}

// Exact moments of F.  All three families are symmetric (c3 = 0); kurtosis is
// 3 (normal), 21/5 (logistic), 6 (laplace).
inline MomentSet theoretical_moments_F(const FamilySpec& spec) {
  if (!(spec.scale_sigma > 0.0)) throw DomainError("FamilySpec: scale_sigma must be > 0");
  const double v = spec.scale_sigma * spec.scale_sigma;
  double kurt = 3.0;
  switch (spec.family) {
    case Family::Normal: kurt = 3.0; break;
    case Family::Logistic: kurt = 4.2; break;
    case Family::Laplace: kurt = 6.0; break;
  }
  return MomentSet{spec.location, v, 0.0, kurt * v * v};
}

// Moment propagation F -> G for the shift mixture:
//   mu_Y   = mu_X + theta*delta
//   var_Y  = var_X + theta(1-theta) delta^2
//   c3_Y   = c3_X + theta(1-theta) delta^3 (1-2 theta)
//   c4_Y   = c4_X + theta(1-theta) delta^4 [(1-theta)(1-3 theta) + theta]
//                 + 6 theta(1-theta) delta^2 var_X
// The last line is the expanded form of the delta^4 [... + 6 var_X/delta^2]
// bracket, so delta = 0 needs no special case and contributes exactly 0.
inline MomentSet mixture_moments(const MomentSet& momF, const MixtureParams& mix) {
  validate(mix);
  const double th = mix.theta;
  const double de = mix.delta;
  const double tq = th * (1.0 - th);
  const double d2 = de * de;
  MomentSet g;
  g.mean = momF.mean + th * de;
  g.var = momF.var + tq * d2;
  g.c3 = momF.c3 + tq * d2 * de * (1.0 - 2.0 * th);
  g.c4 = momF.c4 + tq * d2 * d2 * ((1.0 - th) * (1.0 - 3.0 * th) + th) + 6.0 * tq * d2 * momF.var;
  return g;
}

}  // namespace mixshift
