#include <gtest/gtest.h>

#include "ordvar/baee.hpp"

using namespace ordvar;

TEST(Baee, SquaredErrorPointMass) {
  const auto c = baee_coefficient(Population::One, LossKind::SquaredError, 8, MixingMoments::point_mass());
  EXPECT_NEAR(c.value, 0.1, 1e-15);
  EXPECT_EQ(c.population, Population::One);
}

TEST(Baee, SquaredErrorT5) {
  EXPECT_NEAR(baee_coefficient(Population::One, LossKind::SquaredError, 8, t_preset(5)).value, 0.125, 1e-14);
}

TEST(Baee, EntropyT5) {
  EXPECT_NEAR(baee_coefficient(Population::One, LossKind::Entropy, 8, t_preset(5)).value, 0.46875, 1e-14);
}

TEST(Baee, EntropyIsReciprocalOfMTimesMoment) {
  // 1 / (m E[1/tau]); the alternative reading m / E[1/tau] would give 30 here.
  EXPECT_NEAR(baee_coefficient(Population::Two, LossKind::Entropy, 8, t_preset(5)).value,
              1.0 / (8.0 * 4.0 / 15.0), 1e-14);
}

TEST(Baee, Estimates) {
  const SufficientStatistics s(10.0, 12.0, 0.0, 0.0);
  EXPECT_NEAR(baee_estimate({0.1, Population::One, LossKind::SquaredError}, s), 1.0, 1e-15);
  const SufficientStatistics s8(8.0, 1.0, 0.0, 0.0);
  EXPECT_NEAR(baee_estimate({0.125, Population::One, LossKind::SquaredError}, s8), 1.0, 1e-15);
  const auto c = baee_coefficient(Population::Two, LossKind::Entropy, 12, t_preset(8));
  EXPECT_NEAR(c.value, 1.0, 1e-14);
  EXPECT_NEAR(baee_estimate(c, s), 12.0, 1e-13);
}

TEST(Baee, Errors) {
  EXPECT_THROW(baee_coefficient(Population::One, LossKind::SquaredError, 8, t_preset_entropy_only(4)),
               DomainError);
  EXPECT_NO_THROW(baee_coefficient(Population::One, LossKind::Entropy, 8, t_preset_entropy_only(4)));
  EXPECT_THROW(baee_coefficient(Population::One, LossKind::Entropy, 0, t_preset(5)), DomainError);
}

TEST(Baee, AffineEquivariance) {
  const auto c = baee_coefficient(Population::One, LossKind::SquaredError, 8, t_preset(10));
  const SufficientStatistics s(3.0, 5.0, 1.0, 2.0);
  for (double k : {0.1, 2.0, 1e3}) {
    EXPECT_NEAR(baee_estimate(c, s.scaled(k)), k * baee_estimate(c, s), 1e-12 * k);
  }
}

TEST(Baee, ClosedFormRiskMinimizedAtCoefficient) {
  // E(alpha V - 1)^2 = alpha^2 m (m + 2) - 2 alpha m + 1 for V ~ chi2_m.
  const int m = 8;
  auto risk = [m](double a) { return a * a * m * (m + 2.0) - 2.0 * a * m + 1.0; };
  const double alpha = baee_coefficient(Population::One, LossKind::SquaredError, m, MixingMoments::point_mass()).value;
  EXPECT_NEAR(risk(alpha), 0.2, 1e-14);
  for (double d : {-0.01, -0.001, 0.001, 0.01}) EXPECT_GT(risk(alpha + d), risk(alpha));
}
