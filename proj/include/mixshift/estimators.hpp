#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mixshift/errors.hpp"

namespace mixshift {

// Per-group sufficient statistics.  var uses the n-1 divisor; the central
// moment estimators are plain 1/n plug-ins (the variance formulas only need
// consistency; finite-sample corrections are applied where they are cited).
struct SampleStats {
  std::size_t n = 0;
  double mean = 0.0;
  double var_unbiased = 0.0;
  double c3_plugin = 0.0;
  double c4_plugin = 0.0;
};

inline SampleStats compute_stats(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) throw InsufficientDataError("compute_stats: need at least 2 observations");
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(n);
  double s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    const double d2 = d * d;
    s2 += d2;
    s3 += d2 * d;
    s4 += d2 * d2;
  }
  const double dn = static_cast<double>(n);
  return SampleStats{n, mean, s2 / (dn - 1.0), s3 / dn, s4 / dn};
}

// Both samples with their cached statistics; raw observations are retained
// because the bootstrap and jackknife resample them.
struct TwoSample {
  std::vector<double> control_obs;
  std::vector<double> treatment_obs;
  SampleStats control;
  SampleStats treatment;

  static TwoSample from_observations(std::vector<double> control, std::vector<double> treatment) {
    TwoSample ts;
    ts.control = compute_stats(control);
    ts.treatment = compute_stats(treatment);
    ts.control_obs = std::move(control);
    ts.treatment_obs = std::move(treatment);
    return ts;
  }

  std::size_t total_n() const { return control.n + treatment.n; }
};

// Regularizer keeping the estimator denominator positive: S_X * log(N^2)/N.
// Natural log by default; log_base overrides (e.g. 10) for sensitivity runs.
inline double epsilon_n(double s_x, std::size_t total_n, double log_base = std::numbers::e) {
  const double dn = static_cast<double>(total_n);
  double lg = std::log(dn * dn);
  if (log_base != std::numbers::e) lg /= std::log(log_base);
  return s_x * lg / dn;
}

struct EstimateResult {
  double theta_hat = 1.0;       // in (0,1]
  double delta_hat = 0.0;       // >= 0
  double delta_avg_hat = 0.0;   // stored as theta_hat*delta_hat so the product identity is bitwise
  double epsilon_n = 0.0;
  bool mean_diff_clamped = false;  // (Ybar - Xbar)_+ fired
  bool var_diff_clamped = false;   // (S2_Y - S2_X)_+ fired
  bool degenerate = false;         // denominator was exactly 0 (constant equal samples)
};

// Method-of-moments estimators
//   theta_hat = { 1 + (S2_Y - S2_X)_+ / [ (Ybar - Xbar)_+^2 + eps_N ] }^-1
//   delta_hat = (Ybar - Xbar)_+ * { same brace }
// Throws DegenerateInputError when the variance gap is positive but the
// denominator is exactly 0 (eps_N = 0 and Ybar <= Xbar); a denominator of 0
// with zero numerator instead yields (1, 0) with the degenerate flag.
// epsilon_override replaces the computed eps_N; it exists so the exact scale
// relation theta_hat(cX, cY; c^2 eps) = theta_hat(X, Y; eps) can be exercised.
inline EstimateResult estimate(const SampleStats& control, const SampleStats& treatment,
                               double log_base = std::numbers::e,
                               std::optional<double> epsilon_override = std::nullopt) {
  if (control.n < 2 || treatment.n < 2)
    throw InsufficientDataError("estimate: each group needs at least 2 observations");
  EstimateResult r;
  const double d = treatment.mean - control.mean;
  r.mean_diff_clamped = d < 0.0;
  const double dp = r.mean_diff_clamped ? 0.0 : d;
  const double v = treatment.var_unbiased - control.var_unbiased;
  r.var_diff_clamped = v < 0.0;
  const double vp = r.var_diff_clamped ? 0.0 : v;
  r.epsilon_n = epsilon_override
                    ? *epsilon_override
                    : epsilon_n(std::sqrt(control.var_unbiased), control.n + treatment.n, log_base);
  const double denom = dp * dp + r.epsilon_n;
  double ratio = 0.0;
  if (vp > 0.0) {
    if (denom == 0.0)
      throw DegenerateInputError("estimate: zero denominator with positive variance gap");
    ratio = vp / denom;
  }
  r.degenerate = denom == 0.0;
  const double brace = 1.0 + ratio;
  r.theta_hat = 1.0 / brace;
  r.delta_hat = dp * brace;
  r.delta_avg_hat = r.theta_hat * r.delta_hat;
  return r;
}

inline EstimateResult estimate(const TwoSample& ts, double log_base = std::numbers::e) {
  return estimate(ts.control, ts.treatment, log_base);
}

}  // namespace mixshift
