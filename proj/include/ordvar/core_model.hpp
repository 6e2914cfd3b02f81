#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ordvar/errors.hpp"

namespace ordvar {

// ---------------------------------------------------------------------------
// Loss functions
// ---------------------------------------------------------------------------

enum class LossKind { SquaredError, Entropy };

/// Short tag used in estimator names and file columns: "Q" or "E".
constexpr std::string_view loss_tag(LossKind kind) {
  return kind == LossKind::SquaredError ? "Q" : "E";
}

constexpr std::string_view loss_name(LossKind kind) {
  return kind == LossKind::SquaredError ? "squared-error" : "entropy";
}

/// Scale-invariant loss of `estimate` for the variance `sigma_sq`.
/// SquaredError: (d/s - 1)^2.  Entropy: d/s - ln(d/s) - 1.
inline double loss(LossKind kind, double estimate, double sigma_sq) {
  if (!(estimate > 0.0) || !(sigma_sq > 0.0)) {
    throw DomainError("loss: estimate and variance must be positive");
  }
  const double ratio = estimate / sigma_sq;
  if (kind == LossKind::SquaredError) {
    const double d = ratio - 1.0;
    return d * d;
  }
  // log1p keeps precision when the ratio is close to one.
  const double d = ratio - 1.0;
  return d - std::log1p(d);
}

// ---------------------------------------------------------------------------
// Mixing distribution
// ---------------------------------------------------------------------------

struct PointMassAtOne {};

struct GammaShapeScale {
  double shape;
  double scale;
};

using MixingLaw = std::variant<PointMassAtOne, GammaShapeScale>;

/// E[1/tau], E[1/tau^2] of the mixing variable, optionally with the law
/// that produced them. Only laws can be sampled; moments are all the
/// estimators need.
class MixingMoments {
 public:
  static MixingMoments point_mass() {
    return MixingMoments(1.0, 1.0, PointMassAtOne{}, "point-mass");
  }

  /// Gamma(shape, scale) mixing law; both inverse moments need shape > 2.
  static MixingMoments gamma(double shape, double scale) {
    check_gamma(shape, scale, true);
    const double m1 = 1.0 / ((shape - 1.0) * scale);
    const double m2 = 1.0 / ((shape - 1.0) * (shape - 2.0) * scale * scale);
    return MixingMoments(m1, m2, GammaShapeScale{shape, scale}, "gamma");
  }

  /// Gamma law usable by entropy-loss estimators only (shape > 1); the
  /// second inverse moment may be infinite and is left undefined.
  static MixingMoments gamma_entropy_only(double shape, double scale) {
    check_gamma(shape, scale, false);
    const double m1 = 1.0 / ((shape - 1.0) * scale);
    return MixingMoments(m1, std::nullopt, GammaShapeScale{shape, scale},
                         "gamma-entropy-only");
  }

  /// Moments without a law. Accepted by every estimator, rejected by the
  /// sampler.
  static MixingMoments from_moments(double inv_moment_1,
                                    std::optional<double> inv_moment_2) {
    if (!(inv_moment_1 > 0.0) || !std::isfinite(inv_moment_1)) {
      throw DomainError("mixing moments: E[1/tau] must be positive and finite");
    }
    if (inv_moment_2) {
      if (!(*inv_moment_2 > 0.0) || !std::isfinite(*inv_moment_2)) {
        throw DomainError("mixing moments: E[1/tau^2] must be positive and finite");
      }
      if (*inv_moment_2 - inv_moment_1 * inv_moment_1 < -1e-12) {
        throw DomainError("mixing moments: E[1/tau^2] < E[1/tau]^2 violates Cauchy-Schwarz");
      }
    }
    return MixingMoments(inv_moment_1, inv_moment_2, std::nullopt, "moments-only");
  }

  double inv_moment_1() const noexcept { return inv_moment_1_; }

  bool has_inv_moment_2() const noexcept { return inv_moment_2_.has_value(); }

  double inv_moment_2() const {
    if (!inv_moment_2_) {
      throw DomainError("mixing moments: second inverse moment undefined");
    }
    return *inv_moment_2_;
  }

  /// E[1/tau] / E[1/tau^2], the factor shared by every squared-error
  /// coefficient.
  double moment_ratio() const { return inv_moment_1_ / inv_moment_2(); }

  const std::optional<MixingLaw>& law() const noexcept { return law_; }

  const std::string& tag() const noexcept { return tag_; }

 private:
  MixingMoments(double m1, std::optional<double> m2, std::optional<MixingLaw> law,
                std::string tag)
      : inv_moment_1_(m1), inv_moment_2_(m2), law_(std::move(law)), tag_(std::move(tag)) {}

  static void check_gamma(double shape, double scale, bool need_second) {
    if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(shape)) {
      throw DomainError("gamma mixing law: scale must be positive and finite");
    }
    if (!(shape > 1.0)) {
      throw DomainError("gamma mixing law: first inverse moment undefined (shape <= 1)");
    }
    if (need_second && !(shape > 2.0)) {
      throw DomainError("gamma mixing law: second inverse moment undefined (shape <= 2)");
    }
  }

  double inv_moment_1_;
  std::optional<double> inv_moment_2_;
  std::optional<MixingLaw> law_;
  std::string tag_;
};

namespace detail {
inline void check_nu(double nu, bool need_second) {
  if (!(nu > 2.0)) {
    throw DomainError("multivariate t: first inverse moment undefined (nu <= 2)");
  }
  if (need_second && !(nu > 4.0)) {
    throw DomainError("multivariate t: second inverse moment undefined (nu <= 4)");
  }
}
}  // namespace detail

/// Multivariate-t mixing preset: Gamma(shape nu/2, scale nu/2), so that
/// E[1/tau] = 4/(nu(nu-2)) and E[1/tau]/E[1/tau^2] = nu(nu-4)/4, the
/// constants of the published t-distribution estimators. Requires nu > 4.
inline MixingMoments t_preset(double nu) {
  detail::check_nu(nu, true);
  return MixingMoments::gamma(nu / 2.0, nu / 2.0);
}

/// Entropy-only variant of t_preset, defined for nu > 2.
inline MixingMoments t_preset_entropy_only(double nu) {
  detail::check_nu(nu, false);
  return MixingMoments::gamma_entropy_only(nu / 2.0, nu / 2.0);
}

/// tau = chi2_nu / nu, i.e. Gamma(nu/2, scale 2/nu): E[1/tau] = nu/(nu-2).
inline MixingMoments chisq_over_nu(double nu) {
  detail::check_nu(nu, true);
  return MixingMoments::gamma(nu / 2.0, 2.0 / nu);
}

inline MixingMoments chisq_over_nu_entropy_only(double nu) {
  detail::check_nu(nu, false);
  return MixingMoments::gamma_entropy_only(nu / 2.0, 2.0 / nu);
}

// ---------------------------------------------------------------------------
// Two-population configuration
// ---------------------------------------------------------------------------

class PopulationConfig {
 public:
  PopulationConfig(int p, int q, int n1, int n2, std::vector<double> mu1,
                   std::vector<double> mu2, double sigma1_sq, double sigma2_sq)
      : p_(p), q_(q), n1_(n1), n2_(n2), mu1_(std::move(mu1)), mu2_(std::move(mu2)),
        sigma1_sq_(sigma1_sq), sigma2_sq_(sigma2_sq) {
    if (p_ < 1 || q_ < 1) throw StructuralError("population config: p and q must be >= 1");
    if (n1_ < 2 || n2_ < 2) {
      throw StructuralError("population config: n1 and n2 must be >= 2 (m1, m2 >= 1)");
    }
    if (mu1_.size() != static_cast<std::size_t>(p_)) {
      throw StructuralError("population config: mu1 length differs from p");
    }
    if (mu2_.size() != static_cast<std::size_t>(q_)) {
      throw StructuralError("population config: mu2 length differs from q");
    }
    if (!(sigma1_sq_ > 0.0) || !(sigma2_sq_ > 0.0) || !std::isfinite(sigma1_sq_) ||
        !std::isfinite(sigma2_sq_)) {
      throw DomainError("population config: variances must be positive and finite");
    }
  }

  /// Zero means in both populations.
  static PopulationConfig centered(int p, int q, int n1, int n2, double sigma1_sq,
                                   double sigma2_sq) {
    return PopulationConfig(p, q, n1, n2, std::vector<double>(static_cast<std::size_t>(std::max(p, 0)), 0.0),
                            std::vector<double>(static_cast<std::size_t>(std::max(q, 0)), 0.0),
                            sigma1_sq, sigma2_sq);
  }

  int p() const noexcept { return p_; }
  int q() const noexcept { return q_; }
  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  int m1() const noexcept { return p_ * (n1_ - 1); }
  int m2() const noexcept { return q_ * (n2_ - 1); }
  const std::vector<double>& mu1() const noexcept { return mu1_; }
  const std::vector<double>& mu2() const noexcept { return mu2_; }
  double sigma1_sq() const noexcept { return sigma1_sq_; }
  double sigma2_sq() const noexcept { return sigma2_sq_; }

  /// Whether sigma1^2 <= sigma2^2, the restriction the improved estimators
  /// are built for.
  bool ordered() const noexcept { return sigma1_sq_ <= sigma2_sq_; }

 private:
  int p_, q_, n1_, n2_;
  std::vector<double> mu1_, mu2_;
  double sigma1_sq_, sigma2_sq_;
};

// ---------------------------------------------------------------------------
// Samples and sufficient statistics
// ---------------------------------------------------------------------------

/// One draw of the reduced model: x_i = sqrt(n_i) * sample mean, s_i the
/// within-sample sum of squares.
struct TwoPopulationSample {
  std::vector<double> x1;
  std::vector<double> x2;
  double s1 = 0.0;
  double s2 = 0.0;
  /// Mixing value(s) behind the draw; empty for samples built from data.
  std::optional<double> tau;
  std::optional<double> tau2;
};

class SufficientStatistics {
 public:
  SufficientStatistics(double s1, double s2, double t1, double t2)
      : s1_(s1), s2_(s2), t1_(t1), t2_(t2) {
    if (!(s1_ > 0.0) || !(s2_ > 0.0) || !std::isfinite(s1_) || !std::isfinite(s2_)) {
      throw DomainError("sufficient statistics: S1 and S2 must be positive and finite");
    }
    if (!(t1_ >= 0.0) || !(t2_ >= 0.0)) {
      throw DomainError("sufficient statistics: T1 and T2 must be nonnegative");
    }
  }

  double s1() const noexcept { return s1_; }
  double s2() const noexcept { return s2_; }
  double t1() const noexcept { return t1_; }
  double t2() const noexcept { return t2_; }

  double z1() const noexcept { return s2_ / s1_; }
  double z2() const noexcept { return t1_ / s1_; }
  double z1_star() const noexcept { return s1_ / s2_; }
  double z2_star() const noexcept { return t2_ / s2_; }

  /// Scales (s1, s2, t1, t2) jointly; the ratios are unchanged.
  SufficientStatistics scaled(double c) const {
    return SufficientStatistics(c * s1_, c * s2_, c * t1_, c * t2_);
  }

 private:
  double s1_, s2_, t1_, t2_;
};

namespace detail {
inline double squared_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}
}  // namespace detail

inline SufficientStatistics sufficient_stats(const TwoPopulationSample& sample,
                                             const PopulationConfig& config) {
  if (sample.x1.size() != static_cast<std::size_t>(config.p()) ||
      sample.x2.size() != static_cast<std::size_t>(config.q())) {
    throw StructuralError("sufficient_stats: sample dimensions do not match p, q");
  }
  return SufficientStatistics(sample.s1, sample.s2, detail::squared_norm(sample.x1),
                              detail::squared_norm(sample.x2));
}

/// Reduces raw observations (rows of length p and q) to the sufficient
/// statistics of the model: x_i = sqrt(n_i) * mean, s_i = sum ||y - mean||^2.
inline TwoPopulationSample reduce_observations(std::span<const std::vector<double>> pop1,
                                               std::span<const std::vector<double>> pop2) {
  auto reduce = [](std::span<const std::vector<double>> rows, std::vector<double>& x,
                   double& s) {
    if (rows.size() < 2) {
      throw StructuralError("reduce_observations: need at least two observations");
    }
    const std::size_t dim = rows.front().size();
    if (dim == 0) throw StructuralError("reduce_observations: empty observation vector");
    std::vector<double> mean(dim, 0.0);
    for (const auto& row : rows) {
      if (row.size() != dim) {
        throw StructuralError("reduce_observations: observations differ in dimension");
      }
      for (std::size_t k = 0; k < dim; ++k) mean[k] += row[k];
    }
    const double n = static_cast<double>(rows.size());
    for (double& v : mean) v /= n;
    s = 0.0;
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = row[k] - mean[k];
        s += d * d;
      }
    }
    const double root_n = std::sqrt(n);
    x.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) x[k] = root_n * mean[k];
  };
  TwoPopulationSample out;
  reduce(pop1, out.x1, out.s1);
  reduce(pop2, out.x2, out.s2);
  return out;
}

}  // namespace ordvar
