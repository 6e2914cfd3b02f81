#pragma once

#include <cmath>
#include <string_view>
#include <variant>

#include "ordvar/core_model.hpp"
#include "ordvar/errors.hpp"
#include "ordvar/rng.hpp"

namespace ordvar {

enum class TauSharing { Shared, PerPopulation };

constexpr std::string_view tau_sharing_name(TauSharing s) {
  return s == TauSharing::Shared ? "shared" : "per-population";
}

/// Variate generators on top of one Philox stream.
class VariateSource {
 public:
  explicit VariateSource(const SeedSpec& seed) : engine_(seed) {}

  double uniform() { return engine_.uniform(); }

  /// Standard normal, Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * engine_.uniform() - 1.0;
      v = 2.0 * engine_.uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  /// Gamma(shape, 1), Marsaglia-Tsang; shapes below one are boosted.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw DomainError("gamma variate: shape must be positive");
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      return g * std::pow(engine_.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = engine_.uniform();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_square(double df) { return 2.0 * gamma(0.5 * df); }

  /// One draw of the mixing variable.
  double mixing(const MixingLaw& law) {
    if (std::holds_alternative<PointMassAtOne>(law)) return 1.0;
    const auto& g = std::get<GammaShapeScale>(law);
    return g.scale * gamma(g.shape);
  }

 private:
  Philox4x32 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// One replication of the two-population model. Draw order: tau (and the
/// second tau when not shared), x1, s1, x2, s2.
inline TwoPopulationSample draw(const PopulationConfig& config, const MixingMoments& moments,
                                const SeedSpec& seed, TauSharing sharing = TauSharing::Shared) {
  if (!moments.law()) {
    throw StructuralError("draw: mixing moments carry no sampleable law (" + moments.tag() + ")");
  }
  const MixingLaw& law = *moments.law();
  VariateSource src(seed);
  TwoPopulationSample out;
  const double tau1 = src.mixing(law);
  const double tau2 = sharing == TauSharing::Shared ? tau1 : src.mixing(law);
  out.tau = tau1;
  if (sharing == TauSharing::PerPopulation) out.tau2 = tau2;

  auto fill = [&](int dim, int n, const std::vector<double>& mu, double sigma_sq, double tau,
                  int m, std::vector<double>& x, double& s) {
    const double scale = sigma_sq / tau;
    const double sd = std::sqrt(scale);
    const double root_n = std::sqrt(static_cast<double>(n));
    x.resize(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      x[static_cast<std::size_t>(k)] = root_n * mu[static_cast<std::size_t>(k)] + sd * src.normal();
    }
    s = scale * src.chi_square(m);
  };
  fill(config.p(), config.n1(), config.mu1(), config.sigma1_sq(), tau1, config.m1(), out.x1,
       out.s1);
  fill(config.q(), config.n2(), config.mu2(), config.sigma2_sq(), tau2, config.m2(), out.x2,
       out.s2);
  return out;
}

}  // namespace ordvar
