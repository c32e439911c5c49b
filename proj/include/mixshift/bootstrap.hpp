#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "mixshift/asymptotics.hpp"
#include "mixshift/errors.hpp"
#include "mixshift/estimators.hpp"
#include "mixshift/normal.hpp"
#include "mixshift/rng.hpp"

namespace mixshift {

// Single documented quantile rule: 1-based order statistic at ceil(alpha*B),
// clamped to [1, B], so every endpoint is an actual resampled value.
enum class QuantileRule { CeilOrderStatistic };

// AllN deletes each of the N = m + n observations in turn (single jackknife
// mean); PerGroup centers each group's leave-one-out estimates on that
// group's own mean before pooling the sums (sensitivity alternative).
enum class JackknifeScheme { AllN, PerGroup };

// Center used inside the acceleration sums: the jackknife mean (standard) or
// the bootstrap-distribution mean (alternative reading; never mixed).
enum class AccelCenter { JackknifeMean, BootstrapMean };

struct BootstrapConfig {
  std::size_t B = 1000;
  double level = 0.95;
  Seed seed;
  QuantileRule quantile_rule = QuantileRule::CeilOrderStatistic;
  JackknifeScheme jackknife = JackknifeScheme::AllN;
  AccelCenter accel_center = AccelCenter::JackknifeMean;
  double eps_log_base = std::numbers::e;
};

struct BootstrapDistribution {
  std::vector<double> estimates_theta;
  std::vector<double> estimates_delta;
  EstimateResult point;     // estimate on the original data
  std::size_t skipped = 0;  // resamples whose estimate raised (recorded, not fatal)
};

namespace detail {

inline SampleStats mean_var_stats(std::span<const double> xs) {
  const std::size_t n = xs.size();
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    ss += d * d;
  }
  return SampleStats{n, mean, ss / (static_cast<double>(n) - 1.0), 0.0, 0.0};
}

}  // namespace detail

// B independent with-replacement resample pairs, each reduced through the
// estimator.  Replicate b draws from seed.child(b), so the result does not
// depend on evaluation order.
inline BootstrapDistribution resample(const TwoSample& ts, const BootstrapConfig& cfg) {
  if (ts.control_obs.empty() || ts.treatment_obs.empty())
    throw EmptySampleError("resample: both groups must be nonempty");
  if (cfg.B < 2) throw DomainError("resample: B must be >= 2");
  BootstrapDistribution out;
  out.point = estimate(ts, cfg.eps_log_base);
  out.estimates_theta.reserve(cfg.B);
  out.estimates_delta.reserve(cfg.B);
  const std::size_t m = ts.control_obs.size();
  const std::size_t n = ts.treatment_obs.size();
  std::vector<double> xs(m), ys(n);
  for (std::size_t b = 0; b < cfg.B; ++b) {
    Xoshiro256pp gen(cfg.seed.child(b));
    for (auto& x : xs) x = ts.control_obs[gen.below(m)];
    for (auto& y : ys) y = ts.treatment_obs[gen.below(n)];
    try {
      const EstimateResult est =
          estimate(detail::mean_var_stats(xs), detail::mean_var_stats(ys), cfg.eps_log_base);
      out.estimates_theta.push_back(est.theta_hat);
      out.estimates_delta.push_back(est.delta_hat);
    } catch (const DegenerateInputError&) {
      ++out.skipped;
    }
  }
  return out;
}

// z0 = Phi^-1({#(tau_b < tau) + 1/2 #(tau_b = tau)}/B).  The half-weight on
// ties keeps the argument away from 0/1 for heavily tied distributions (e.g.
// theta piled at 1); an argument of exactly 0 or 1 still maps to -+inf, which
// the interval construction treats as a fallback trigger.
inline double bias_correction_z0(std::span<const double> boot, double point) {
  if (boot.empty()) throw EmptySampleError("bias_correction_z0: empty bootstrap vector");
  double count = 0.0;
  for (double b : boot) {
    if (b < point) count += 1.0;
    else if (b == point) count += 0.5;
  }
  const double arg = count / static_cast<double>(boot.size());
  if (arg <= 0.0) return -std::numeric_limits<double>::infinity();
  if (arg >= 1.0) return std::numeric_limits<double>::infinity();
  return std_normal_quantile(arg);
}

namespace detail {

// Delete-one downdating from cached (n, mean, SS): O(1) per deletion instead
// of a full recompute.  SS is clamped at 0 against roundoff.
struct GroupDowndater {
  double n, mean, ss;

  explicit GroupDowndater(const SampleStats& s)
      : n(static_cast<double>(s.n)),
        mean(s.mean),
        ss(s.var_unbiased * (static_cast<double>(s.n) - 1.0)) {}

  SampleStats without(double x) const {
    const double d = x - mean;
    const double ss_i = std::max(0.0, ss - d * d * n / (n - 1.0));
    return SampleStats{static_cast<std::size_t>(n) - 1, mean - d / (n - 1.0),
                       ss_i / (n - 2.0), 0.0, 0.0};
  }
};

inline double pick(const EstimateResult& est, Target t) {
  return t == Target::Theta ? est.theta_hat : est.delta_hat;
}

}  // namespace detail

// All N leave-one-out estimates for the chosen target, control group first.
// Requires both groups to keep >= 2 observations after a deletion.
inline std::vector<double> leave_one_out_estimates(const TwoSample& ts, Target target,
                                                   double log_base = std::numbers::e) {
  if (ts.control.n < 3 || ts.treatment.n < 3)
    throw InsufficientDataError("leave_one_out_estimates: each group needs >= 3 observations");
  std::vector<double> out;
  out.reserve(ts.total_n());
  const detail::GroupDowndater cx(ts.control);
  const detail::GroupDowndater cy(ts.treatment);
  for (double x : ts.control_obs)
    out.push_back(detail::pick(estimate(cx.without(x), ts.treatment, log_base), target));
  for (double y : ts.treatment_obs)
    out.push_back(detail::pick(estimate(ts.control, cy.without(y), log_base), target));
  return out;
}

namespace detail {

// Shared accumulator for the acceleration sums; spans may contribute with a
// common override center or each with their own mean.
struct AccelSums {
  double sum2 = 0.0, sum3 = 0.0;

  void add(std::span<const double> vals, std::optional<double> center_override) {
    double center;
    if (center_override) {
      center = *center_override;
    } else {
      center = 0.0;
      for (double v : vals) center += v;
      center /= static_cast<double>(vals.size());
    }
    for (double v : vals) {
      const double d = center - v;
      sum2 += d * d;
      sum3 += d * d * d;
    }
  }

  double value() const {
    if (sum2 <= 0.0) return 0.0;
    return sum3 / (6.0 * std::pow(sum2, 1.5));
  }
};

}  // namespace detail

// Acceleration a = sum d_i^3 / (6 [sum d_i^2]^(3/2)) over jackknife deviations
// d_i = center - tau_(-i); 0 when the deviations vanish.  Exposed on explicit
// leave-one-out values so the arithmetic is checkable in isolation.
inline double acceleration_from_loo(std::span<const double> loo,
                                    std::optional<double> center_override = std::nullopt) {
  if (loo.empty()) throw EmptySampleError("acceleration_from_loo: empty leave-one-out vector");
  detail::AccelSums s;
  s.add(loo, center_override);
  return s.value();
}

// Acceleration for a two-sample dataset under the configured jackknife scheme.
// center_override substitutes an external center (the bootstrap mean) for
// every deviation in place of the per-span jackknife mean.
inline double acceleration_a(const TwoSample& ts, Target target,
                             JackknifeScheme scheme = JackknifeScheme::AllN,
                             std::optional<double> center_override = std::nullopt,
                             double log_base = std::numbers::e) {
  const std::vector<double> loo = leave_one_out_estimates(ts, target, log_base);
  if (scheme == JackknifeScheme::AllN) return acceleration_from_loo(loo, center_override);
  detail::AccelSums s;
  s.add(std::span<const double>(loo).first(ts.control.n), center_override);
  s.add(std::span<const double>(loo).subspan(ts.control.n), center_override);
  return s.value();
}

namespace detail {

inline double order_statistic(std::span<const double> sorted, double alpha) {
  const double b = static_cast<double>(sorted.size());
  const auto idx = static_cast<std::size_t>(
      std::clamp(std::ceil(alpha * b), 1.0, b));
  return sorted[idx - 1];
}

inline std::vector<double> sorted_copy(const std::vector<double>& v) {
  std::vector<double> s(v);
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace detail

// Adjusted BCa levels
//   alpha_l = Phi(z0 + (z0 - z)/(1 - a(z0 - z))),
//   alpha_u = Phi(z0 + (z0 + z)/(1 - a(z0 + z))),  z = Phi^-1(1 - alpha/2).
// Falls back to the plain percentile levels (with the flag set) when z0 is
// infinite or an adjustment denominator is <= 0.  When both denominators are
// positive, alpha_l < alpha_u always holds: w -> z0 + w/(1 - a w) is strictly
// increasing on the region where 1 - a w > 0.
struct BCaAlphaLevels {
  double alpha_l = 0.0;
  double alpha_u = 0.0;
  bool fallback = false;
};

inline BCaAlphaLevels bca_alpha_levels(double z0, double a, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("bca_alpha_levels: level must lie in (0,1)");
  const double alpha = 1.0 - level;
  const double z = std_normal_quantile(1.0 - alpha / 2.0);
  BCaAlphaLevels out{alpha / 2.0, 1.0 - alpha / 2.0, !std::isfinite(z0)};
  if (out.fallback) return out;
  const double wl = z0 - z;
  const double wu = z0 + z;
  const double denom_l = 1.0 - a * wl;
  const double denom_u = 1.0 - a * wu;
  if (denom_l <= 0.0 || denom_u <= 0.0) {
    out.fallback = true;
    return out;
  }
  out.alpha_l = std_normal_cdf(z0 + wl / denom_l);
  out.alpha_u = std_normal_cdf(z0 + wu / denom_u);
  return out;
}

// BCa interval: the adjusted levels above, looked up in the sorted bootstrap
// distribution under the documented order-statistic rule.
inline IntervalResult bca_interval(const BootstrapDistribution& boot, const TwoSample& ts,
                                   const BootstrapConfig& cfg, Target target) {
  const std::vector<double>& est =
      target == Target::Theta ? boot.estimates_theta : boot.estimates_delta;
  if (est.size() < 2) throw InsufficientDataError("bca_interval: need >= 2 bootstrap estimates");
  const double point = detail::pick(boot.point, target);

  BCaDiagnostics diag;
  diag.z0 = bias_correction_z0(est, point);
  std::optional<double> center;
  if (cfg.accel_center == AccelCenter::BootstrapMean) {
    double s = 0.0;
    for (double v : est) s += v;
    center = s / static_cast<double>(est.size());
  }
  diag.a = acceleration_a(ts, target, cfg.jackknife, center, cfg.eps_log_base);

  const BCaAlphaLevels lv = bca_alpha_levels(diag.z0, diag.a, cfg.level);
  diag.fallback_used = lv.fallback;
  diag.alpha_l = lv.alpha_l;
  diag.alpha_u = lv.alpha_u;
  const double alpha_l = lv.alpha_l;
  const double alpha_u = lv.alpha_u;

  const std::vector<double> sorted = detail::sorted_copy(est);
  IntervalResult iv;
  iv.method = Method::BCa;
  iv.target = target;
  iv.level = cfg.level;
  iv.lower = detail::order_statistic(sorted, alpha_l);
  iv.upper = detail::order_statistic(sorted, alpha_u);
  truncate_to_parameter_space(iv);
  iv.diagnostics = diag;
  return iv;
}

// Centered percentile comparator: (2 tau - q_{1-alpha/2}, 2 tau - q_{alpha/2})
// under the same quantile rule, truncated to the parameter space.
inline IntervalResult centered_percentile_interval(const BootstrapDistribution& boot,
                                                   const BootstrapConfig& cfg, Target target) {
  const std::vector<double>& est =
      target == Target::Theta ? boot.estimates_theta : boot.estimates_delta;
  if (est.size() < 2)
    throw InsufficientDataError("centered_percentile_interval: need >= 2 bootstrap estimates");
  const double point = detail::pick(boot.point, target);
  const double alpha = 1.0 - cfg.level;
  const std::vector<double> sorted = detail::sorted_copy(est);
  IntervalResult iv;
  iv.method = Method::CenteredPercentile;
  iv.target = target;
  iv.level = cfg.level;
  iv.lower = 2.0 * point - detail::order_statistic(sorted, 1.0 - alpha / 2.0);
  iv.upper = 2.0 * point - detail::order_statistic(sorted, alpha / 2.0);
  truncate_to_parameter_space(iv);
  return iv;
}

}  // namespace mixshift
