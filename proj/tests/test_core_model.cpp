#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ordvar/core_model.hpp"

using namespace ordvar;

TEST(Loss, SquaredErrorValues) {
  EXPECT_DOUBLE_EQ(loss(LossKind::SquaredError, 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(loss(LossKind::SquaredError, 2.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(loss(LossKind::SquaredError, 0.5, 2.0), 0.5625);
}

TEST(Loss, EntropyValues) {
  EXPECT_DOUBLE_EQ(loss(LossKind::Entropy, 3.0, 3.0), 0.0);
  EXPECT_NEAR(loss(LossKind::Entropy, 2.0, 1.0), 1.0 - std::log(2.0), 1e-15);
  EXPECT_NEAR(loss(LossKind::Entropy, 0.5, 1.0), 0.5 - std::log(0.5) - 1.0, 1e-15);
  // Near one the log1p form keeps relative precision: d^2/2 to leading order.
  EXPECT_NEAR(loss(LossKind::Entropy, 1.0 + 1e-6, 1.0) / 5e-13, 1.0, 1e-5);
}

TEST(Loss, RejectsNonpositive) {
  EXPECT_THROW(loss(LossKind::SquaredError, 0.0, 1.0), DomainError);
  EXPECT_THROW(loss(LossKind::Entropy, 1.0, -1.0), DomainError);
}

TEST(Loss, ScaleInvariant) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double d = u(gen), s = u(gen), c = u(gen);
    for (auto k : {LossKind::SquaredError, LossKind::Entropy}) {
      EXPECT_NEAR(loss(k, c * d, c * s), loss(k, d, s), 1e-12 * (1.0 + loss(k, d, s)));
    }
  }
}

TEST(MixingMoments, PointMass) {
  const auto m = MixingMoments::point_mass();
  EXPECT_EQ(m.inv_moment_1(), 1.0);
  EXPECT_EQ(m.inv_moment_2(), 1.0);
  EXPECT_TRUE(m.law().has_value());
}

TEST(MixingMoments, TPresetConstants) {
  for (double nu : {5.0, 8.0, 10.0, 15.0}) {
    const auto m = t_preset(nu);
    EXPECT_NEAR(m.inv_moment_1(), 4.0 / (nu * (nu - 2.0)), 1e-15);
    EXPECT_NEAR(m.moment_ratio(), nu * (nu - 4.0) / 4.0, 1e-12);
    EXPECT_NEAR(1.0 / m.inv_moment_1(), nu * (nu - 2.0) / 4.0, 1e-12);
  }
  EXPECT_NEAR(t_preset(5).inv_moment_1(), 4.0 / 15.0, 1e-15);
}

TEST(MixingMoments, ChisqOverNu) {
  const auto m = chisq_over_nu(8);
  EXPECT_NEAR(m.inv_moment_1(), 8.0 / 6.0, 1e-14);
  EXPECT_NEAR(m.inv_moment_2(), 64.0 / (6.0 * 4.0), 1e-12);
}

TEST(MixingMoments, UndefinedMoments) {
  EXPECT_THROW(t_preset(4.0), DomainError);
  EXPECT_THROW(t_preset(2.0), DomainError);
  EXPECT_NO_THROW(t_preset_entropy_only(3.0));
  const auto e = t_preset_entropy_only(3.0);
  EXPECT_FALSE(e.has_inv_moment_2());
  EXPECT_THROW(e.inv_moment_2(), DomainError);
  EXPECT_THROW(e.moment_ratio(), DomainError);
  EXPECT_THROW(MixingMoments::gamma(2.0, 1.0), DomainError);
  EXPECT_THROW(MixingMoments::gamma(3.0, 0.0), DomainError);
}

TEST(MixingMoments, FromMomentsValidation) {
  EXPECT_NO_THROW(MixingMoments::from_moments(2.0, 4.0));
  EXPECT_NO_THROW(MixingMoments::from_moments(2.0, std::nullopt));
  EXPECT_THROW(MixingMoments::from_moments(2.0, 3.0), DomainError);  // below E[1/tau]^2
  EXPECT_THROW(MixingMoments::from_moments(0.0, 1.0), DomainError);
  EXPECT_FALSE(MixingMoments::from_moments(2.0, 5.0).law().has_value());
}

TEST(PopulationConfig, Validation) {
  EXPECT_THROW(PopulationConfig(2, 2, 1, 5, {0, 0}, {0, 0}, 1, 1), StructuralError);
  EXPECT_THROW(PopulationConfig(2, 2, 5, 5, {0}, {0, 0}, 1, 1), StructuralError);
  EXPECT_THROW(PopulationConfig(2, 2, 5, 5, {0, 0}, {0, 0, 0}, 1, 1), StructuralError);
  EXPECT_THROW(PopulationConfig(0, 2, 5, 5, {}, {0, 0}, 1, 1), StructuralError);
  EXPECT_THROW(PopulationConfig(2, 2, 5, 5, {0, 0}, {0, 0}, 0, 1), DomainError);
  const auto c = PopulationConfig::centered(2, 3, 5, 7, 0.5, 1.0);
  EXPECT_EQ(c.m1(), 8);
  EXPECT_EQ(c.m2(), 18);
  EXPECT_TRUE(c.ordered());
  EXPECT_FALSE(PopulationConfig::centered(1, 1, 3, 3, 2.0, 1.0).ordered());
}

TEST(SufficientStatistics, Ratios) {
  const SufficientStatistics s(2.0, 6.0, 1.0, 3.0);
  EXPECT_DOUBLE_EQ(s.z1(), 3.0);
  EXPECT_DOUBLE_EQ(s.z2(), 0.5);
  EXPECT_DOUBLE_EQ(s.z1_star(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.z2_star(), 0.5);
  const auto t = s.scaled(4.0);
  EXPECT_DOUBLE_EQ(t.z1(), s.z1());
  EXPECT_DOUBLE_EQ(t.z2_star(), s.z2_star());
  EXPECT_THROW(SufficientStatistics(0.0, 1.0, 0.0, 0.0), DomainError);
  EXPECT_THROW(SufficientStatistics(1.0, 1.0, -1.0, 0.0), DomainError);
}

TEST(SufficientStatistics, FromSample) {
  const auto cfg = PopulationConfig::centered(2, 1, 4, 4, 1.0, 1.0);
  TwoPopulationSample smp{{1.0, 2.0}, {3.0}, 2.0, 4.0, std::nullopt, std::nullopt};
  const auto s = sufficient_stats(smp, cfg);
  EXPECT_DOUBLE_EQ(s.t1(), 5.0);
  EXPECT_DOUBLE_EQ(s.t2(), 9.0);
  smp.x2 = {1.0, 1.0};
  EXPECT_THROW(sufficient_stats(smp, cfg), StructuralError);
}

TEST(ReduceObservations, MeansAndSums) {
  const std::vector<std::vector<double>> a = {{1.0, 0.0}, {3.0, 2.0}};
  const std::vector<std::vector<double>> b = {{1.0}, {2.0}, {3.0}};
  const auto smp = reduce_observations(a, b);
  EXPECT_NEAR(smp.x1[0], std::sqrt(2.0) * 2.0, 1e-14);
  EXPECT_NEAR(smp.x1[1], std::sqrt(2.0) * 1.0, 1e-14);
  EXPECT_NEAR(smp.s1, 2.0 + 2.0, 1e-14);
  EXPECT_NEAR(smp.x2[0], std::sqrt(3.0) * 2.0, 1e-14);
  EXPECT_NEAR(smp.s2, 2.0, 1e-14);
  const std::vector<std::vector<double>> ragged = {{1.0}, {1.0, 2.0}};
  EXPECT_THROW(reduce_observations(ragged, b), StructuralError);
  const std::vector<std::vector<double>> single = {{1.0}};
  EXPECT_THROW(reduce_observations(single, b), StructuralError);
}
