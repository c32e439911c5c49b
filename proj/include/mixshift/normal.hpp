#pragma once

#include <cmath>
#include <limits>

#include "mixshift/errors.hpp"

namespace mixshift {

namespace detail {

inline constexpr double sqrt_pi = 1.7724538509055160273;
inline constexpr double sqrt_2 = 1.4142135623730950488;

// erf(z) for 0 <= z < 2.5 via the all-positive-term confluent series
// erf(z) = 2 z e^{-z^2}/sqrt(pi) * sum_k (2 z^2)^k / (1*3*...*(2k+1)).
inline double erf_series(double z) {
  const double tz = 2.0 * z * z;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= tz / (2 * k + 1);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return 2.0 * z * std::exp(-z * z) / sqrt_pi * sum;
}

// erfc(z) for z >= 2.5 via the Laplace continued fraction
// erfc(z) = e^{-z^2}/sqrt(pi) / (z + (1/2)/(z + (2/2)/(z + (3/2)/(z + ...)))),
// evaluated with the modified Lentz algorithm.
inline double erfc_cf(double z) {
  const double tiny = 1e-300;
  double f = z;
  double c = f;
  double d = 0.0;
  for (int n = 1; n <= 300; ++n) {
    const double a = 0.5 * n;
    d = z + a * d;
    if (d == 0.0) d = tiny;
    d = 1.0 / d;
    c = z + a / c;
    if (c == 0.0) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-z * z) / (sqrt_pi * f);
}

}  // namespace detail

// Standard normal CDF, accurate to ~1e-15 absolute and to full relative
// precision in the lower tail (series below |z| = 2.5, continued fraction
// beyond).
inline double std_normal_cdf(double x) {
  const double z = x / detail::sqrt_2;
  const double az = std::abs(z);
  double tail;  // Phi(-|x|)
  if (az < 2.5) {
    tail = 0.5 * (1.0 - detail::erf_series(az));
  } else {
    tail = 0.5 * detail::erfc_cf(az);
  }
  return x < 0.0 ? tail : 1.0 - tail;
}

// Inverse standard normal CDF: Wichura's algorithm AS241 (PPND16), accurate to
// ~2e-16 relative over p in (0,1); far exceeds the 1e-9 contract.
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p must lie in (0,1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
    x = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    x = num / den;
  }
  return q < 0.0 ? -x : x;
}

}  // namespace mixshift
