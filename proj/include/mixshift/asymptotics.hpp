#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>

#include "mixshift/distributions.hpp"
#include "mixshift/errors.hpp"
#include "mixshift/estimators.hpp"
#include "mixshift/normal.hpp"

namespace mixshift {

enum class Method { Asymptotic, BCa, CenteredPercentile };
enum class Target { Theta, Delta };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Asymptotic: return "asymptotic";
    case Method::BCa: return "bca";
    case Method::CenteredPercentile: return "centered";
  }
  return "?";
}

inline const char* target_name(Target t) {
  return t == Target::Theta ? "theta" : "delta";
}

// Diagnostics attached to bootstrap intervals (defined here so IntervalResult
// can carry them; produced by the bootstrap header).
struct BCaDiagnostics {
  double z0 = 0.0;  // can be +-inf when every resample fell on one side
  double a = 0.0;
  double alpha_l = 0.0;
  double alpha_u = 0.0;
  bool fallback_used = false;  // plain percentile levels substituted
};

struct IntervalResult {
  Method method = Method::Asymptotic;
  Target target = Target::Theta;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  bool truncated_low = false;
  bool truncated_high = false;
  std::optional<BCaDiagnostics> diagnostics;

  double length() const { return upper - lower; }
  bool contains(double value) const { return lower <= value && value <= upper; }
};

// Clamp an interval to the parameter space: theta in [0,1], delta in [0,inf).
inline void truncate_to_parameter_space(IntervalResult& iv) {
  const double hi = iv.target == Target::Theta ? 1.0 : std::numeric_limits<double>::infinity();
  iv.truncated_low = iv.lower < 0.0;
  iv.truncated_high = iv.upper > hi;
  iv.lower = std::clamp(iv.lower, 0.0, hi);
  iv.upper = std::clamp(iv.upper, 0.0, hi);
}

// Population asymptotic variance of sqrt(n)(theta_hat - theta):
//   (1 + V/D^2)^-4 { 4V^2/D^6 (varX+varY) - 4V/D^5 (c3X+c3Y)
//                    + [(c4X - varX^2) + (c4Y - varY^2)]/D^4 }
// with D = mu_Y - mu_X, V = var_Y - var_X.  The middle covariance term is
// linear in V (first-order delta method); see finite_sample_variances for the
// quadratic variant kept for sensitivity checks.  Negative values (possible
// for non-mixture MomentSet inputs) are floored at 0.
inline double sigma2_theta(const MomentSet& momX, const MomentSet& momY) {
  const double d = momY.mean - momX.mean;
  if (!(d > 0.0)) throw UndefinedPopulationError("sigma2_theta: requires mu_Y > mu_X");
  const double v = momY.var - momX.var;
  const double d2 = d * d;
  const double lead = std::pow(1.0 + v / d2, -4.0);
  const double d4 = d2 * d2;
  const double brace = 4.0 * v * v / (d4 * d2) * (momX.var + momY.var) -
                       4.0 * v / (d4 * d) * (momX.c3 + momY.c3) +
                       ((momX.c4 - momX.var * momX.var) + (momY.c4 - momY.var * momY.var)) / d4;
  return std::max(0.0, lead * brace);
}

// Population asymptotic variance of sqrt(n)(delta_hat - delta):
//   (1 - V/D^2)^2 (varX+varY) + 2(1 - V/D^2)(c3X+c3Y)/D
//   + [(c4X - varX^2) + (c4Y - varY^2)]/D^2
inline double sigma2_delta(const MomentSet& momX, const MomentSet& momY) {
  const double d = momY.mean - momX.mean;
  if (!(d > 0.0)) throw UndefinedPopulationError("sigma2_delta: requires mu_Y > mu_X");
  const double v = momY.var - momX.var;
  const double w = 1.0 - v / (d * d);
  const double quart = (momX.c4 - momX.var * momX.var) + (momY.c4 - momY.var * momY.var);
  const double raw = w * w * (momX.var + momY.var) + 2.0 * w * (momX.c3 + momY.c3) / d +
                     quart / (d * d);
  return std::max(0.0, raw);
}

// Plug-in substitutions feeding the finite-sample variance forms:
//   d = (Ybar - Xbar)_+ + eps_N,  v = (S2_Y - S2_X)_+.
// var_s2_correction toggles the (n-3)/(n-1) factor inside Var(S^2); with the
// factor off and m = n the finite-sample forms equal sigma2_*/n exactly.
// mid_term_exponent selects v^1 (default, the delta-method value) or v^2 in
// the middle covariance term of the theta variance; the quadratic variant
// exists only for sensitivity analysis and fails the Monte Carlo SD-ratio
// validation (see README).
struct PluginMoments {
  double d = 0.0;
  double v = 0.0;
  bool var_s2_correction = true;
  int mid_term_exponent = 1;

  static PluginMoments from(const SampleStats& control, const SampleStats& treatment,
                            double log_base = std::numbers::e) {
    PluginMoments p;
    const double diff = treatment.mean - control.mean;
    const double eps = epsilon_n(std::sqrt(control.var_unbiased),
                                 control.n + treatment.n, log_base);
    p.d = std::max(0.0, diff) + eps;
    p.v = std::max(0.0, treatment.var_unbiased - control.var_unbiased);
    return p;
  }
};

struct VarianceEstimates {
  double var_theta = 0.0;  // on the estimator scale: no further /n needed
  double var_delta = 0.0;
  double se_theta = 0.0;
  double se_delta = 0.0;
  bool floored_theta = false;  // raw plug-in value was negative, clamped to 0
  bool floored_delta = false;
};

namespace detail {

// Var(S^2) = (1/n)(c4 - f*s2^2), f = (n-3)/(n-1) when corrected else 1.
inline double var_s2(const SampleStats& s, bool corrected) {
  const double n = static_cast<double>(s.n);
  const double f = corrected ? (n - 3.0) / (n - 1.0) : 1.0;
  return (s.c4_plugin - f * s.var_unbiased * s.var_unbiased) / n;
}

}  // namespace detail

// General-(m,n) delta-method variances with plug-in substitutions, already on
// the estimator scale (Var(theta_hat), Var(delta_hat); no further /n).  Uses
// Var(Xbar) = s2/m, Cov(Xbar, S2) = c3/m, Var(S^2) as above.  Negative raw
// results are floored at 0 and flagged so coverage tables stay computable.
inline VarianceEstimates finite_sample_variances(const SampleStats& control,
                                                 const SampleStats& treatment,
                                                 const PluginMoments& p) {
  const double m = static_cast<double>(control.n);
  const double n = static_cast<double>(treatment.n);
  const double d = p.d;
  const double v = p.v;
  const double d2 = d * d;
  const double d4 = d2 * d2;
  const double mean_part = control.var_unbiased / m + treatment.var_unbiased / n;
  const double skew_part = control.c3_plugin / m + treatment.c3_plugin / n;
  const double s2_part = detail::var_s2(control, p.var_s2_correction) +
                         detail::var_s2(treatment, p.var_s2_correction);
  const double v_mid = p.mid_term_exponent == 2 ? v * v : v;

  const double lead = std::pow(1.0 + v / d2, -4.0);
  const double raw_theta = lead * (4.0 * v * v / (d4 * d2) * mean_part -
                                   4.0 * v_mid / (d4 * d) * skew_part + s2_part / d4);
  const double w = 1.0 - v / d2;
  const double raw_delta = w * w * mean_part + 2.0 * w * skew_part / d + s2_part / d2;

  VarianceEstimates ve;
  ve.floored_theta = raw_theta < 0.0;
  ve.floored_delta = raw_delta < 0.0;
  ve.var_theta = std::max(0.0, raw_theta);
  ve.var_delta = std::max(0.0, raw_delta);
  ve.se_theta = std::sqrt(ve.var_theta);
  ve.se_delta = std::sqrt(ve.var_delta);
  return ve;
}

// Symmetric intervals theta_hat +- z*se and delta_hat +- z*se, truncated to
// the parameter space.  se values are on the estimator scale.
inline std::pair<IntervalResult, IntervalResult> asymptotic_ci(const EstimateResult& est,
                                                               const VarianceEstimates& ve,
                                                               double level = 0.95) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("asymptotic_ci: level must lie in (0,1)");
  const double z = std_normal_quantile(1.0 - (1.0 - level) / 2.0);
  IntervalResult th;
  th.method = Method::Asymptotic;
  th.target = Target::Theta;
  th.level = level;
  th.lower = est.theta_hat - z * ve.se_theta;
  th.upper = est.theta_hat + z * ve.se_theta;
  truncate_to_parameter_space(th);
  IntervalResult de;
  de.method = Method::Asymptotic;
  de.target = Target::Delta;
  de.level = level;
  de.lower = est.delta_hat - z * ve.se_delta;
  de.upper = est.delta_hat + z * ve.se_delta;
  truncate_to_parameter_space(de);
  return {th, de};
}

}  // namespace mixshift
