#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string_view>
#include <unordered_map>

#include "ordvar/baee.hpp"
#include "ordvar/core_model.hpp"
#include "ordvar/errors.hpp"
#include "ordvar/quadrature.hpp"
#include "ordvar/special_functions.hpp"

namespace ordvar {

enum class Target { Sigma1, Sigma2 };

constexpr std::string_view target_name(Target t) {
  return t == Target::Sigma1 ? "sigma1" : "sigma2";
}

inline constexpr double kDefaultQuadTol = 1e-10;

namespace detail {

inline void check_quad_tol(double quad_tol) {
  if (!(quad_tol > 0.0) || quad_tol > 1e-6) {
    throw DomainError("boundary function: quad_tol must lie in (0, 1e-6]");
  }
}

inline void check_dofs(int m1, int m2) {
  if (m1 < 1 || m2 < 1) throw DomainError("boundary function: m1 and m2 must be >= 1");
}

// Constants of one boundary function. The value at argument w is
//   scale * ((a + b) / b) * I(b0 + 0) / I(b0 + 1)
// where the incomplete beta arguments depend on the target.
struct BoundaryShape {
  double scale;  // coefficient of the first-order (small-u / small-r) regime
  double a;      // first beta parameter
  double b;      // second beta parameter of the numerator integral
  double log_beta_lo;
  double log_beta_hi;
};

inline BoundaryShape boundary_shape(Target target, LossKind loss, int m1, int m2,
                                    const MixingMoments& moments) {
  check_dofs(m1, m2);
  const double scale = loss == LossKind::SquaredError
                           ? moments.moment_ratio() / (m1 + m2 + 2.0)
                           : 1.0 / ((m1 + m2) * moments.inv_moment_1());
  const double shift = loss == LossKind::SquaredError ? 2.0 : 0.0;
  BoundaryShape s{};
  s.scale = scale;
  if (target == Target::Sigma1) {
    s.a = 0.5 * m2;
    s.b = 0.5 * (m1 + shift);
    s.log_beta_lo = special::log_beta(s.a, s.b);
    s.log_beta_hi = special::log_beta(s.a, s.b + 1.0);
  } else {
    s.a = 0.5 * m1;
    s.b = 0.5 * (m2 + shift);
    s.log_beta_lo = special::log_beta(s.b, s.a);
    s.log_beta_hi = special::log_beta(s.b + 1.0, s.a);
  }
  return s;
}

// phi*(u): x = u / (1 + u), ratio I_x(a, b) / I_x(a, b + 1).
inline double phi_star_eval(const BoundaryShape& s, double u) {
  if (!(u > 0.0) || !std::isfinite(u)) {
    throw DomainError("phi_star_sigma1: argument must be positive and finite");
  }
  const double x = u / (1.0 + u);
  const double xc = 1.0 / (1.0 + u);
  const double log_lo = special::log_regularized_beta(s.a, s.b, x, xc, s.log_beta_lo);
  const double log_hi = special::log_regularized_beta(s.a, s.b + 1.0, x, xc, s.log_beta_hi);
  return s.scale * ((s.a + s.b) / s.b) * std::exp(log_lo - log_hi);
}

// psi*(r): y = 1 / (1 + r), ratio I_y(b, a) / I_y(b + 1, a).
inline double psi_star_eval(const BoundaryShape& s, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("psi_star_sigma2: argument must be positive and finite");
  }
  const double y = 1.0 / (1.0 + r);
  const double yc = r / (1.0 + r);
  const double log_lo = special::log_regularized_beta(s.b, s.a, y, yc, s.log_beta_lo);
  const double log_hi = special::log_regularized_beta(s.b + 1.0, s.a, y, yc, s.log_beta_hi);
  return s.scale * ((s.a + s.b) / s.b) * std::exp(log_lo - log_hi);
}

}  // namespace detail

/// Boundary of the sigma1 class: phi(u) must stay at or above this curve.
/// Nondecreasing in u, tends to the BAEE coefficient as u grows.
inline double phi_star_sigma1(double u1, LossKind loss, int m1, int m2,
                              const MixingMoments& moments, double quad_tol = kDefaultQuadTol) {
  detail::check_quad_tol(quad_tol);
  return detail::phi_star_eval(detail::boundary_shape(Target::Sigma1, loss, m1, m2, moments), u1);
}

/// Boundary of the sigma2 class: psi(r) must stay at or below this curve.
/// Nondecreasing in r, tends to the BAEE coefficient as r goes to zero.
inline double psi_star_sigma2(double r, LossKind loss, int m1, int m2,
                              const MixingMoments& moments, double quad_tol = kDefaultQuadTol) {
  detail::check_quad_tol(quad_tol);
  return detail::psi_star_eval(detail::boundary_shape(Target::Sigma2, loss, m1, m2, moments), r);
}

/// psi* straight from its survival-weighted integrals,
///   E[V2^k (1 - G1(r V2))] / E[V2^k],  V2 ~ chi2_m2, G1 the chi2_m1 cdf,
/// by adaptive Gauss-Kronrod on (0, inf). Slower than psi_star_sigma2; kept
/// as a cross-check.
inline double psi_star_sigma2_quadrature(double r, LossKind loss, int m1, int m2,
                                         const MixingMoments& moments,
                                         double quad_tol = kDefaultQuadTol) {
  detail::check_quad_tol(quad_tol);
  detail::check_dofs(m1, m2);
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("psi_star_sigma2: argument must be positive and finite");
  }
  const int k_lo = loss == LossKind::SquaredError ? 1 : 0;
  const double df1 = m1;
  const double df2 = m2;
  // Tilting chi2_m2 by v^k gives chi2_(m2 + 2k), so each normalized integral is
  // a density times a survival function.
  auto normalized = [&](int k) {
    const double df = df2 + 2.0 * k;
    auto f = [&](double v) {
      return special::chi_square_density(df, v) * special::chi_square_survival(df1, r * v);
    };
    const auto coarse = quad::integrate_gk_semi_infinite(f, 1e-3);
    const double tol = quad_tol * std::max(std::fabs(coarse.value), 1e-300);
    const auto fine = quad::integrate_gk_semi_infinite(f, tol);
    if (!fine.converged) {
      throw NumericalError("psi_star_sigma2_quadrature: tolerance not reached",
                           fine.abs_error / std::max(std::fabs(fine.value), 1e-300));
    }
    return fine.value;
  };
  const double lo = normalized(k_lo);
  const double hi = normalized(k_lo + 1);
  // E[V2^k] ratio: m2 + 2k_lo.
  const double moment_step = df2 + 2.0 * k_lo;
  const double scale = loss == LossKind::SquaredError ? moments.moment_ratio()
                                                      : 1.0 / moments.inv_moment_1();
  return scale * lo / (moment_step * hi);
}

/// Memoized boundary function of one (target, loss, m1, m2, moments) setting.
/// Arguments are rounded to 12 significant digits before evaluation, so a
/// cached and an uncached call return the same double.
class BoundaryFunction {
 public:
  BoundaryFunction(Target target, LossKind loss, int m1, int m2, MixingMoments moments,
                   double quad_tol = kDefaultQuadTol, std::size_t max_cache_entries = 1u << 16)
      : target_(target), loss_(loss), m1_(m1), m2_(m2), moments_(std::move(moments)),
        quad_tol_(quad_tol), max_cache_entries_(max_cache_entries),
        shape_(detail::boundary_shape(target, loss, m1, m2, moments_)),
        limit_(baee_coefficient(target == Target::Sigma1 ? Population::One : Population::Two,
                                loss, target == Target::Sigma1 ? m1 : m2, moments_)
                   .value) {
    detail::check_quad_tol(quad_tol);
  }

  BoundaryFunction(const BoundaryFunction&) = delete;
  BoundaryFunction& operator=(const BoundaryFunction&) = delete;

  double operator()(double arg) const {
    if (!(arg > 0.0) || !std::isfinite(arg)) {
      throw DomainError("boundary function: argument must be positive and finite");
    }
    const auto [key, rounded] = round_key(arg);
    {
      std::shared_lock lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    const double value = uncached(rounded);
    std::unique_lock lock(mutex_);
    if (cache_.size() >= max_cache_entries_) cache_.clear();
    cache_.emplace(key, value);
    return value;
  }

  /// Evaluation at the rounded argument, bypassing the cache.
  double uncached(double arg) const {
    return target_ == Target::Sigma1 ? detail::phi_star_eval(shape_, arg)
                                     : detail::psi_star_eval(shape_, arg);
  }

  /// BAEE coefficient approached at u -> inf (sigma1) or r -> 0 (sigma2).
  double limit() const noexcept { return limit_; }

  Target target() const noexcept { return target_; }
  LossKind loss() const noexcept { return loss_; }
  int m1() const noexcept { return m1_; }
  int m2() const noexcept { return m2_; }
  const MixingMoments& moments() const noexcept { return moments_; }
  double quad_tol() const noexcept { return quad_tol_; }

  std::size_t cache_size() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
  }

  static std::pair<std::uint64_t, double> round_key(double arg) {
    int exponent = 0;
    const double mantissa = std::frexp(arg, &exponent);  // [0.5, 1)
    const auto digits = static_cast<std::uint64_t>(std::llround(mantissa * 1e12));
    const double rounded = std::ldexp(static_cast<double>(digits) / 1e12, exponent);
    const auto key = (static_cast<std::uint64_t>(exponent + 2048) << 41) | digits;
    return {key, rounded};
  }

 private:
  Target target_;
  LossKind loss_;
  int m1_, m2_;
  MixingMoments moments_;
  double quad_tol_;
  std::size_t max_cache_entries_;
  detail::BoundaryShape shape_;
  double limit_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace ordvar
