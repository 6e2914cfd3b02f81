#pragma once

#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "ordvar/errors.hpp"

namespace ordvar::special {

inline double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

inline double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

namespace detail {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 20000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  double last_delta = 0.0;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double dm = m;
    const double m2 = 2.0 * dm;
    double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    last_delta = std::fabs(delta - 1.0);
    if (last_delta < kEps) return h;
  }
  throw NumericalError("incomplete beta: continued fraction did not converge", last_delta);
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b). The caller passes 1 - x as well so
/// that arguments close to one keep full precision.
inline double regularized_beta(double a, double b, double x, double one_minus_x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("regularized_beta: a, b must be positive");
  if (!(x >= 0.0) || !(one_minus_x >= 0.0)) {
    throw DomainError("regularized_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (one_minus_x == 0.0) return 1.0;
  const double log_front =
      a * std::log(x) + b * std::log(one_minus_x) - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * detail::beta_continued_fraction(b, a, one_minus_x) / b;
}

/// log I_x(a, b) with the log-beta term supplied by the caller, so that it
/// is not recomputed for every argument. Stays finite where I_x underflows.
inline double log_regularized_beta(double a, double b, double x, double one_minus_x,
                                   double log_beta_ab) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("log_regularized_beta: a, b must be positive");
  if (!(x > 0.0) || !(one_minus_x >= 0.0)) {
    throw DomainError("log_regularized_beta: x must lie in (0, 1]");
  }
  if (one_minus_x == 0.0) return 0.0;
  const double log_front = a * std::log(x) + b * std::log(one_minus_x) - log_beta_ab;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return log_front + std::log(detail::beta_continued_fraction(a, b, x) / a);
  }
  return std::log1p(-std::exp(log_front) * detail::beta_continued_fraction(b, a, one_minus_x) / b);
}

inline double log_regularized_beta(double a, double b, double x, double one_minus_x) {
  return log_regularized_beta(a, b, x, one_minus_x, log_beta(a, b));
}

inline double regularized_beta(double a, double b, double x) {
  return regularized_beta(a, b, x, 1.0 - x);
}

/// P(chi2_df > x).
inline double chi_square_survival(double df, double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

/// Density of chi2_df at x.
inline double chi_square_density(double df, double x) {
  if (x <= 0.0) return 0.0;
  const double k = 0.5 * df;
  return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::log(2.0) - log_gamma(k));
}

}  // namespace ordvar::special
