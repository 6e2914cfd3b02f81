#pragma once

#include "ordvar/core_model.hpp"
#include "ordvar/errors.hpp"

namespace ordvar {

enum class Population { One = 1, Two = 2 };

struct BaeeCoefficient {
  double value;
  Population population;
  LossKind loss;
};

/// alpha * S_i with alpha optimal among affine equivariant estimators.
/// SquaredError: E[1/tau] / ((m+2) E[1/tau^2]).  Entropy: 1 / (m E[1/tau]).
inline BaeeCoefficient baee_coefficient(Population population, LossKind loss, int m,
                                        const MixingMoments& moments) {
  if (m < 1) throw DomainError("baee_coefficient: degrees of freedom must be >= 1");
  double value = 0.0;
  if (loss == LossKind::SquaredError) {
    value = moments.moment_ratio() / (m + 2.0);
  } else {
    value = 1.0 / (m * moments.inv_moment_1());
  }
  return {value, population, loss};
}

inline double baee_estimate(const BaeeCoefficient& coef, const SufficientStatistics& stats) {
  return coef.value * (coef.population == Population::One ? stats.s1() : stats.s2());
}

}  // namespace ordvar
