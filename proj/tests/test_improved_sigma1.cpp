#include <gtest/gtest.h>

#include <random>

#include "ordvar/improved_sigma1.hpp"

using namespace ordvar;

namespace {
const auto kPoint = MixingMoments::point_mass();

SufficientStatistics with_z1(double z1, double z2 = 0.0, double s1 = 1.0) {
  return SufficientStatistics(s1, z1 * s1, z2 * s1, 0.0);
}
}  // namespace

TEST(Phi11, Values) {
  EXPECT_NEAR(phi11_q(0.0, 8, 12, kPoint), 1.0 / 22.0, 1e-15);
  EXPECT_NEAR(phi11_q(1.2, 8, 12, kPoint), 0.1, 1e-15);
  EXPECT_NEAR(phi11_q(3.0, 8, 12, t_preset(5)), 4.0 * 1.25 / 22.0, 1e-14);
  EXPECT_NEAR(phi11_e(1.0, 8, 12, kPoint), 0.1, 1e-15);
  EXPECT_LT(phi11_q(1.0, 8, 12, kPoint), phi11_q(1.1, 8, 12, kPoint));
}

TEST(MinCombinator, SquaredErrorBaeeBase) {
  auto est = min_combinator_sqerr([](double) { return 0.1; }, 8, 12, 2, kPoint);
  EXPECT_NEAR(est.coefficient(with_z1(0.5)), 1.5 / 22.0, 1e-15);
  EXPECT_NEAR(est.coefficient(with_z1(2.0)), 0.1, 1e-15);
  EXPECT_FALSE(est.dominance_guaranteed());
}

TEST(MinCombinator, NeverIncreasesBase) {
  auto est = min_combinator_sqerr([](double) { return 0.05; }, 8, 12, 2, kPoint);
  for (double z : {0.2, 0.5, 1.0, 3.0, 50.0}) EXPECT_LE(est.coefficient(with_z1(z)), 0.05);
  EXPECT_NEAR(est.coefficient(with_z1(1.0)), 0.05, 1e-15);
}

TEST(MinCombinator, Entropy) {
  auto est = min_combinator_entropy([](double) { return 0.125; }, 8, 12, 2, kPoint);
  EXPECT_NEAR(est.coefficient(with_z1(1.0)), 0.1, 1e-15);
  EXPECT_NEAR(est.coefficient(with_z1(1.5)), 0.125, 1e-15);
  auto t5 = min_combinator_entropy([](double) { return 0.46875; }, 8, 12, 2, t_preset(5));
  EXPECT_NEAR(t5.coefficient(with_z1(1e-12)), 0.1875, 1e-12);
}

TEST(MinCombinator, MatchesD11WithBaeeBase) {
  for (auto loss : {LossKind::SquaredError, LossKind::Entropy}) {
    const auto d11 = Sigma1Estimator::d11(loss, 8, 12, 2, t_preset(8));
    const double alpha = d11.baee_value();
    const auto comb = Sigma1Estimator::min_combinator(
        Sigma1Estimator::Base1([alpha](double) { return alpha; }), loss, 8, 12, 2, t_preset(8));
    for (double z : {1e-9, 0.3, 1.0, 1.49, 1.51, 4.0}) {
      EXPECT_NEAR(comb.coefficient(with_z1(z)), d11.coefficient(with_z1(z)), 1e-15);
    }
  }
}

TEST(D11, Thresholds) {
  const auto q = Sigma1Estimator::d11(LossKind::SquaredError, 8, 12, 2, kPoint);
  EXPECT_NEAR(q.coefficient(with_z1(1.2)), 0.1, 1e-15);  // tie: both branches agree
  EXPECT_NEAR(q.coefficient(with_z1(1.0)), 2.0 / 22.0, 1e-15);
  EXPECT_NEAR(q.coefficient(with_z1(1.3)), 0.1, 1e-15);
  const auto e = Sigma1Estimator::d11(LossKind::Entropy, 8, 12, 2, kPoint);
  EXPECT_NEAR(e.coefficient(with_z1(1.5)), 0.125, 1e-15);
  EXPECT_NEAR(e.coefficient(with_z1(1.0)), 0.1, 1e-15);
}

TEST(D12, SquaredErrorExamples) {
  EXPECT_NEAR(d12_estimate(with_z1(0.5, 0.5), LossKind::SquaredError, 8, 12, 2, kPoint), 2.0 / 24.0, 1e-15);
  EXPECT_NEAR(d12_estimate(with_z1(2.0, 0.5), LossKind::SquaredError, 8, 12, 2, kPoint), 0.1, 1e-15);
  // z2 beyond (m2 + p)/(m1 + 2) - z1 = 0.9 falls back to the BAEE.
  EXPECT_NEAR(d12_estimate(with_z1(0.5, 0.95), LossKind::SquaredError, 8, 12, 2, kPoint), 0.1, 1e-15);
  // Both branches scale with S1.
  EXPECT_NEAR(d12_estimate(with_z1(0.5, 0.5, 3.0), LossKind::SquaredError, 8, 12, 2, kPoint), 0.25, 1e-14);
}

TEST(D12, EntropyExample) {
  EXPECT_NEAR(d12_estimate(with_z1(0.5, 0.25), LossKind::Entropy, 8, 12, 2, t_preset(5)), 1.75 * 3.75 / 18.0, 1e-14);
}

TEST(D12, EntropyNeedsEnoughDegreesOfFreedom) {
  EXPECT_THROW(Sigma1Estimator::d12(LossKind::Entropy, 1, 2, 1, kPoint), DomainError);
  EXPECT_NO_THROW(Sigma1Estimator::d12(LossKind::SquaredError, 1, 2, 1, kPoint));
  EXPECT_NO_THROW(Sigma1Estimator::d12(LossKind::Entropy, 2, 2, 1, kPoint));
}

TEST(Sigma1, SquaredErrorNeedsSecondMoment) {
  EXPECT_THROW(Sigma1Estimator::d11(LossKind::SquaredError, 8, 12, 2, t_preset_entropy_only(4)), DomainError);
  EXPECT_NO_THROW(Sigma1Estimator::d11(LossKind::Entropy, 8, 12, 2, t_preset_entropy_only(4)));
}

TEST(Sigma1, PointwiseShrinkProperty) {
  std::mt19937_64 gen(5);
  std::gamma_distribution<double> g(3.0, 2.0);
  for (auto loss : {LossKind::SquaredError, LossKind::Entropy}) {
    for (auto [m1, m2] : {std::pair{8, 12}, {18, 14}, {38, 32}}) {
      const auto baee = Sigma1Estimator::baee(loss, m1, m2, 2, t_preset(10));
      const auto d11 = Sigma1Estimator::d11(loss, m1, m2, 2, t_preset(10));
      const auto d12 = Sigma1Estimator::d12(loss, m1, m2, 2, t_preset(10));
      int strict = 0;
      for (int i = 0; i < 2000; ++i) {
        const SufficientStatistics s(g(gen), g(gen), 0.2 * g(gen), g(gen));
        const double b = baee.estimate(s);
        EXPECT_LE(d11.estimate(s), b * (1 + 1e-15));
        EXPECT_LE(d12.estimate(s), b * (1 + 1e-15));
        strict += d11.estimate(s) < b;
      }
      EXPECT_GT(strict, 0);
    }
  }
}

TEST(Sigma1, ScaleEquivariance) {
  const auto d12 = Sigma1Estimator::d12(LossKind::SquaredError, 8, 12, 2, t_preset(5));
  const SufficientStatistics s(2.0, 1.5, 0.4, 3.0);
  for (double c : {0.01, 7.0, 1e4}) {
    EXPECT_NEAR(d12.estimate(s.scaled(c)), c * d12.estimate(s), 1e-12 * c);
  }
}

TEST(Sigma1, TwoArgumentCombinator) {
  const auto est = Sigma1Estimator::min_combinator(
      Sigma1Estimator::Base2([](double, double) { return 0.1; }), LossKind::SquaredError, 8, 12, 2, kPoint);
  EXPECT_NEAR(est.coefficient(with_z1(0.5, 0.5)), 2.0 / 24.0, 1e-15);
  EXPECT_NEAR(est.coefficient(with_z1(0.5, 5.0)), 0.1, 1e-15);
  EXPECT_NEAR(phi21(0.5, 0.25, LossKind::Entropy, 8, 12, 2, t_preset(5)), 1.75 * 3.75 / 18.0, 1e-14);
}
