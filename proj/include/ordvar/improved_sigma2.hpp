#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <string>

#include "ordvar/baee.hpp"
#include "ordvar/boundary.hpp"
#include "ordvar/core_model.hpp"
#include "ordvar/errors.hpp"
#include "ordvar/improved_sigma1.hpp"

namespace ordvar {

/// SquaredError (1 + z1*) E[1/tau] / ((m1 + m2 + 2) E[1/tau^2]);
/// Entropy (1 + z1*) / ((m1 + m2) E[1/tau]).
inline double psi11(double z1_star, LossKind loss, int m1, int m2, const MixingMoments& moments) {
  if (loss == LossKind::SquaredError) {
    return (1.0 + z1_star) * moments.moment_ratio() / (m1 + m2 + 2.0);
  }
  return (1.0 + z1_star) / ((m1 + m2) * moments.inv_moment_1());
}

/// Same form as phi21 with q in place of p.
inline double psi21(double z1_star, double z2_star, LossKind loss, int m1, int m2, int q,
                    const MixingMoments& moments) {
  if (loss == LossKind::SquaredError) {
    return (1.0 + z1_star + z2_star) * moments.moment_ratio() / (m1 + m2 + q + 2.0);
  }
  detail::check_entropy_dofs(loss, m1, m2, q, "psi21");
  return (1.0 + z1_star + z2_star) / ((m1 + m2 + q - 4.0) * moments.inv_moment_1());
}

/// Estimator of sigma2^2 of the form psi(Z1*[, Z2*]) * S2.
class Sigma2Estimator {
 public:
  enum class Kind { Baee, D21, D22, MaxCombinator, KubokawaBoundary };
  using Base1 = std::function<double(double)>;
  using Base2 = std::function<double(double, double)>;

  static Sigma2Estimator baee(LossKind loss, int m1, int m2, int q, const MixingMoments& moments) {
    return Sigma2Estimator(Kind::Baee, loss, m1, m2, q, moments);
  }

  static Sigma2Estimator d21(LossKind loss, int m1, int m2, int q, const MixingMoments& moments) {
    return Sigma2Estimator(Kind::D21, loss, m1, m2, q, moments);
  }

  static Sigma2Estimator d22(LossKind loss, int m1, int m2, int q, const MixingMoments& moments) {
    detail::check_entropy_dofs(loss, m1, m2, q, "d22");
    return Sigma2Estimator(Kind::D22, loss, m1, m2, q, moments);
  }

  /// max{base(z1*), psi11(z1*)} * S2.
  static Sigma2Estimator max_combinator(Base1 base, LossKind loss, int m1, int m2, int q,
                                        const MixingMoments& moments) {
    if (!base) throw StructuralError("max_combinator: empty base function");
    Sigma2Estimator e(Kind::MaxCombinator, loss, m1, m2, q, moments);
    e.base1_ = std::move(base);
    return e;
  }

  /// max{base(z1*, z2*), psi21(z1*, z2*)} * S2.
  static Sigma2Estimator max_combinator(Base2 base, LossKind loss, int m1, int m2, int q,
                                        const MixingMoments& moments) {
    if (!base) throw StructuralError("max_combinator: empty base function");
    detail::check_entropy_dofs(loss, m1, m2, q, "max_combinator");
    Sigma2Estimator e(Kind::MaxCombinator, loss, m1, m2, q, moments);
    e.base2_ = std::move(base);
    return e;
  }

  /// psi*(Z1*) * S2 with a shared memoized boundary function.
  static Sigma2Estimator boundary(LossKind loss, int m1, int m2, int q,
                                  const MixingMoments& moments,
                                  double quad_tol = kDefaultQuadTol) {
    Sigma2Estimator e(Kind::KubokawaBoundary, loss, m1, m2, q, moments);
    e.boundary_ = std::make_shared<const BoundaryFunction>(Target::Sigma2, loss, m1, m2,
                                                           moments, quad_tol);
    return e;
  }

  double coefficient(const SufficientStatistics& stats) const {
    const double z1 = stats.z1_star();
    switch (kind_) {
      case Kind::Baee:
        return alpha_;
      case Kind::D21:
        return z1 >= z1_threshold_ ? (1.0 + z1) * c11_ : alpha_;
      case Kind::D22: {
        const double z2 = stats.z2_star();
        const bool inside = z1 >= z1_threshold_ && z2 >= z12_threshold_ - z1;
        return inside ? (1.0 + z1 + z2) * c21_ : alpha_;
      }
      case Kind::MaxCombinator:
        if (base1_) return std::max(base1_(z1), (1.0 + z1) * c11_);
        return std::max(base2_(z1, stats.z2_star()), (1.0 + z1 + stats.z2_star()) * c21_);
      case Kind::KubokawaBoundary:
        return (*boundary_)(z1);
    }
    return alpha_;
  }

  double estimate(const SufficientStatistics& stats) const {
    return coefficient(stats) * stats.s2();
  }

  bool dominance_guaranteed() const noexcept { return kind_ != Kind::MaxCombinator; }

  Kind kind() const noexcept { return kind_; }
  LossKind loss() const noexcept { return loss_; }
  int m1() const noexcept { return m1_; }
  int m2() const noexcept { return m2_; }
  int q() const noexcept { return q_; }
  double baee_value() const noexcept { return alpha_; }
  const MixingMoments& moments() const noexcept { return moments_; }
  const std::shared_ptr<const BoundaryFunction>& boundary_function() const noexcept {
    return boundary_;
  }

 private:
  Sigma2Estimator(Kind kind, LossKind loss, int m1, int m2, int q, const MixingMoments& moments)
      : kind_(kind), loss_(loss), m1_(m1), m2_(m2), q_(q), moments_(moments) {
    if (m1 < 1 || m2 < 1 || q < 1) {
      throw DomainError("sigma2 estimator: m1, m2 and q must be >= 1");
    }
    alpha_ = baee_coefficient(Population::Two, loss, m2, moments).value;
    if (loss == LossKind::SquaredError) {
      const double ratio = moments.moment_ratio();
      c11_ = ratio / (m1 + m2 + 2.0);
      c21_ = ratio / (m1 + m2 + q + 2.0);
      z1_threshold_ = static_cast<double>(m1) / (m2 + 2.0);
      z12_threshold_ = (m1 + q) / (m2 + 2.0);
    } else {
      const double w1 = moments.inv_moment_1();
      c11_ = 1.0 / ((m1 + m2) * w1);
      c21_ = m1 + m2 + q > 4 ? 1.0 / ((m1 + m2 + q - 4.0) * w1) : 0.0;
      z1_threshold_ = static_cast<double>(m1) / m2;
      z12_threshold_ = (m1 + q - 4.0) / m2;
    }
  }

  Kind kind_;
  LossKind loss_;
  int m1_, m2_, q_;
  MixingMoments moments_;
  double alpha_ = 0.0;
  double c11_ = 0.0;
  double c21_ = 0.0;
  double z1_threshold_ = 0.0;
  double z12_threshold_ = 0.0;
  Base1 base1_;
  Base2 base2_;
  std::shared_ptr<const BoundaryFunction> boundary_;
};

inline Sigma2Estimator max_combinator(Sigma2Estimator::Base1 base, LossKind loss, int m1, int m2,
                                      int q, const MixingMoments& moments) {
  return Sigma2Estimator::max_combinator(std::move(base), loss, m1, m2, q, moments);
}

inline double d21_estimate(const SufficientStatistics& stats, LossKind loss, int m1, int m2,
                           const MixingMoments& moments) {
  return Sigma2Estimator::d21(loss, m1, m2, 1, moments).estimate(stats);
}

inline double d22_estimate(const SufficientStatistics& stats, LossKind loss, int m1, int m2,
                           int q, const MixingMoments& moments) {
  return Sigma2Estimator::d22(loss, m1, m2, q, moments).estimate(stats);
}

}  // namespace ordvar
