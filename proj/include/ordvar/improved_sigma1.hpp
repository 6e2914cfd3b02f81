#pragma once

#include <functional>
#include <memory>
#include <string>

#include "ordvar/baee.hpp"
#include "ordvar/boundary.hpp"
#include "ordvar/core_model.hpp"
#include "ordvar/errors.hpp"

namespace ordvar {

/// (1 + z1) E[1/tau] / ((m1 + m2 + 2) E[1/tau^2]).
inline double phi11_q(double z1, int m1, int m2, const MixingMoments& moments) {
  return (1.0 + z1) * moments.moment_ratio() / (m1 + m2 + 2.0);
}

/// (1 + z1) / ((m1 + m2) E[1/tau]).
inline double phi11_e(double z1, int m1, int m2, const MixingMoments& moments) {
  return (1.0 + z1) / ((m1 + m2) * moments.inv_moment_1());
}

inline double phi11(double z1, LossKind loss, int m1, int m2, const MixingMoments& moments) {
  return loss == LossKind::SquaredError ? phi11_q(z1, m1, m2, moments)
                                        : phi11_e(z1, m1, m2, moments);
}

namespace detail {
inline void check_entropy_dofs(LossKind loss, int m1, int m2, int extra, const char* what) {
  if (loss == LossKind::Entropy && m1 + m2 + extra <= 4) {
    throw DomainError(std::string(what) + ": entropy version needs m1 + m2 + dim > 4");
  }
}
}  // namespace detail

/// Bound used with both ratio statistics:
/// SquaredError (1 + z1 + z2) E[1/tau] / ((m1 + m2 + p + 2) E[1/tau^2]),
/// Entropy (1 + z1 + z2) / ((m1 + m2 + p - 4) E[1/tau]).
inline double phi21(double z1, double z2, LossKind loss, int m1, int m2, int p,
                    const MixingMoments& moments) {
  if (loss == LossKind::SquaredError) {
    return (1.0 + z1 + z2) * moments.moment_ratio() / (m1 + m2 + p + 2.0);
  }
  detail::check_entropy_dofs(loss, m1, m2, p, "phi21");
  return (1.0 + z1 + z2) / ((m1 + m2 + p - 4.0) * moments.inv_moment_1());
}

/// Estimator of sigma1^2 of the form phi(Z1[, Z2]) * S1.
class Sigma1Estimator {
 public:
  enum class Kind { Baee, D11, D12, MinCombinator, KubokawaBoundary };
  using Base1 = std::function<double(double)>;
  using Base2 = std::function<double(double, double)>;

  static Sigma1Estimator baee(LossKind loss, int m1, int m2, int p, const MixingMoments& moments) {
    return Sigma1Estimator(Kind::Baee, loss, m1, m2, p, moments);
  }

  static Sigma1Estimator d11(LossKind loss, int m1, int m2, int p, const MixingMoments& moments) {
    return Sigma1Estimator(Kind::D11, loss, m1, m2, p, moments);
  }

  static Sigma1Estimator d12(LossKind loss, int m1, int m2, int p, const MixingMoments& moments) {
    detail::check_entropy_dofs(loss, m1, m2, p, "d12");
    return Sigma1Estimator(Kind::D12, loss, m1, m2, p, moments);
  }

  /// min{base(z1), phi11(z1)} * S1.
  static Sigma1Estimator min_combinator(Base1 base, LossKind loss, int m1, int m2, int p,
                                        const MixingMoments& moments) {
    if (!base) throw StructuralError("min_combinator: empty base function");
    Sigma1Estimator e(Kind::MinCombinator, loss, m1, m2, p, moments);
    e.base1_ = std::move(base);
    return e;
  }

  /// min{base(z1, z2), phi21(z1, z2)} * S1.
  static Sigma1Estimator min_combinator(Base2 base, LossKind loss, int m1, int m2, int p,
                                        const MixingMoments& moments) {
    if (!base) throw StructuralError("min_combinator: empty base function");
    detail::check_entropy_dofs(loss, m1, m2, p, "min_combinator");
    Sigma1Estimator e(Kind::MinCombinator, loss, m1, m2, p, moments);
    e.base2_ = std::move(base);
    return e;
  }

  /// phi*(Z1) * S1 with a shared memoized boundary function.
  static Sigma1Estimator boundary(LossKind loss, int m1, int m2, int p,
                                  const MixingMoments& moments,
                                  double quad_tol = kDefaultQuadTol) {
    Sigma1Estimator e(Kind::KubokawaBoundary, loss, m1, m2, p, moments);
    e.boundary_ = std::make_shared<const BoundaryFunction>(Target::Sigma1, loss, m1, m2,
                                                           moments, quad_tol);
    return e;
  }

  double coefficient(const SufficientStatistics& stats) const {
    const double z1 = stats.z1();
    switch (kind_) {
      case Kind::Baee:
        return alpha_;
      case Kind::D11:
        return z1 <= z1_threshold_ ? (1.0 + z1) * c11_ : alpha_;
      case Kind::D12: {
        const double z2 = stats.z2();
        const bool inside = z1 <= z1_threshold_ && z2 <= z12_threshold_ - z1;
        return inside ? (1.0 + z1 + z2) * c21_ : alpha_;
      }
      case Kind::MinCombinator:
        if (base1_) return std::min(base1_(z1), (1.0 + z1) * c11_);
        return std::min(base2_(z1, stats.z2()), (1.0 + z1 + stats.z2()) * c21_);
      case Kind::KubokawaBoundary:
        return (*boundary_)(z1);
    }
    return alpha_;
  }

  double estimate(const SufficientStatistics& stats) const {
    return coefficient(stats) * stats.s1();
  }

  /// False for combinators built on a user-supplied base.
  bool dominance_guaranteed() const noexcept { return kind_ != Kind::MinCombinator; }

  Kind kind() const noexcept { return kind_; }
  LossKind loss() const noexcept { return loss_; }
  int m1() const noexcept { return m1_; }
  int m2() const noexcept { return m2_; }
  int p() const noexcept { return p_; }
  double baee_value() const noexcept { return alpha_; }
  const MixingMoments& moments() const noexcept { return moments_; }
  const std::shared_ptr<const BoundaryFunction>& boundary_function() const noexcept {
    return boundary_;
  }

 private:
  Sigma1Estimator(Kind kind, LossKind loss, int m1, int m2, int p, const MixingMoments& moments)
      : kind_(kind), loss_(loss), m1_(m1), m2_(m2), p_(p), moments_(moments) {
    if (m1 < 1 || m2 < 1 || p < 1) {
      throw DomainError("sigma1 estimator: m1, m2 and p must be >= 1");
    }
    alpha_ = baee_coefficient(Population::One, loss, m1, moments).value;
    if (loss == LossKind::SquaredError) {
      const double ratio = moments.moment_ratio();
      c11_ = ratio / (m1 + m2 + 2.0);
      c21_ = ratio / (m1 + m2 + p + 2.0);
      z1_threshold_ = static_cast<double>(m2) / (m1 + 2.0);
      z12_threshold_ = (m2 + p) / (m1 + 2.0);
    } else {
      const double w1 = moments.inv_moment_1();
      c11_ = 1.0 / ((m1 + m2) * w1);
      c21_ = m1 + m2 + p > 4 ? 1.0 / ((m1 + m2 + p - 4.0) * w1) : 0.0;
      z1_threshold_ = static_cast<double>(m2) / m1;
      z12_threshold_ = (m2 + p - 4.0) / m1;
    }
  }

  Kind kind_;
  LossKind loss_;
  int m1_, m2_, p_;
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

inline Sigma1Estimator min_combinator_sqerr(Sigma1Estimator::Base1 base, int m1, int m2, int p,
                                            const MixingMoments& moments) {
  return Sigma1Estimator::min_combinator(std::move(base), LossKind::SquaredError, m1, m2, p,
                                         moments);
}

inline Sigma1Estimator min_combinator_entropy(Sigma1Estimator::Base1 base, int m1, int m2, int p,
                                              const MixingMoments& moments) {
  return Sigma1Estimator::min_combinator(std::move(base), LossKind::Entropy, m1, m2, p, moments);
}

inline double d11_estimate(const SufficientStatistics& stats, LossKind loss, int m1, int m2,
                           const MixingMoments& moments) {
  return Sigma1Estimator::d11(loss, m1, m2, 1, moments).estimate(stats);
}

inline double d12_estimate(const SufficientStatistics& stats, LossKind loss, int m1, int m2,
                           int p, const MixingMoments& moments) {
  return Sigma1Estimator::d12(loss, m1, m2, p, moments).estimate(stats);
}

}  // namespace ordvar
