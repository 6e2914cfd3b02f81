#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ordvar/core_model.hpp"
#include "ordvar/errors.hpp"
#include "ordvar/improved_sigma1.hpp"
#include "ordvar/improved_sigma2.hpp"

namespace ordvar {

enum class EstimatorFamily { Baee, D11, D12, D21, D22, Boundary };

/// Names one estimator of a grid: family, target and loss. Text form is
/// e.g. "d11_Q", "d22_E", "baee1_Q", "dBZ_Q" (sigma1), "dBZ2_E"; "dBZ1_Q" is
/// accepted as an alias of "dBZ_Q".
struct EstimatorSpec {
  EstimatorFamily family = EstimatorFamily::Baee;
  Target target = Target::Sigma1;
  LossKind loss = LossKind::SquaredError;

  std::string name() const {
    std::string stem;
    switch (family) {
      case EstimatorFamily::Baee: stem = target == Target::Sigma1 ? "baee1" : "baee2"; break;
      case EstimatorFamily::D11: stem = "d11"; break;
      case EstimatorFamily::D12: stem = "d12"; break;
      case EstimatorFamily::D21: stem = "d21"; break;
      case EstimatorFamily::D22: stem = "d22"; break;
      case EstimatorFamily::Boundary: stem = target == Target::Sigma1 ? "dBZ" : "dBZ2"; break;
    }
    return stem + "_" + std::string(loss_tag(loss));
  }

  EstimatorSpec baseline() const { return {EstimatorFamily::Baee, target, loss}; }

  bool operator==(const EstimatorSpec&) const = default;

  static std::optional<EstimatorSpec> parse(std::string_view text) {
    const auto underscore = text.rfind('_');
    if (underscore == std::string_view::npos) return std::nullopt;
    const auto stem = text.substr(0, underscore);
    const auto tag = text.substr(underscore + 1);
    EstimatorSpec spec;
    if (tag == "Q") {
      spec.loss = LossKind::SquaredError;
    } else if (tag == "E") {
      spec.loss = LossKind::Entropy;
    } else {
      return std::nullopt;
    }
    struct Entry {
      std::string_view stem;
      EstimatorFamily family;
      Target target;
    };
    static constexpr std::array<Entry, 9> table = {{
        {"baee1", EstimatorFamily::Baee, Target::Sigma1},
        {"baee2", EstimatorFamily::Baee, Target::Sigma2},
        {"d11", EstimatorFamily::D11, Target::Sigma1},
        {"d12", EstimatorFamily::D12, Target::Sigma1},
        {"d21", EstimatorFamily::D21, Target::Sigma2},
        {"d22", EstimatorFamily::D22, Target::Sigma2},
        {"dBZ", EstimatorFamily::Boundary, Target::Sigma1},
        {"dBZ1", EstimatorFamily::Boundary, Target::Sigma1},
        {"dBZ2", EstimatorFamily::Boundary, Target::Sigma2},
    }};
    for (const auto& e : table) {
      if (e.stem == stem) {
        spec.family = e.family;
        spec.target = e.target;
        return spec;
      }
    }
    return std::nullopt;
  }
};

/// A concrete estimator of sigma1^2 or sigma2^2.
class Estimator {
 public:
  Estimator(Sigma1Estimator e) : impl_(std::move(e)) {}
  Estimator(Sigma2Estimator e) : impl_(std::move(e)) {}

  Target target() const noexcept {
    return std::holds_alternative<Sigma1Estimator>(impl_) ? Target::Sigma1 : Target::Sigma2;
  }

  LossKind loss() const noexcept {
    return std::visit([](const auto& e) { return e.loss(); }, impl_);
  }

  double coefficient(const SufficientStatistics& stats) const {
    return std::visit([&](const auto& e) { return e.coefficient(stats); }, impl_);
  }

  double estimate(const SufficientStatistics& stats) const {
    return std::visit([&](const auto& e) { return e.estimate(stats); }, impl_);
  }

  bool dominance_guaranteed() const noexcept {
    return std::visit([](const auto& e) { return e.dominance_guaranteed(); }, impl_);
  }

  const std::variant<Sigma1Estimator, Sigma2Estimator>& get() const noexcept { return impl_; }

 private:
  std::variant<Sigma1Estimator, Sigma2Estimator> impl_;
};

inline Estimator make_estimator(const EstimatorSpec& spec, int m1, int m2, int p, int q,
                                const MixingMoments& moments,
                                double quad_tol = kDefaultQuadTol) {
  const LossKind loss = spec.loss;
  if (spec.target == Target::Sigma1) {
    switch (spec.family) {
      case EstimatorFamily::Baee: return Sigma1Estimator::baee(loss, m1, m2, p, moments);
      case EstimatorFamily::D11: return Sigma1Estimator::d11(loss, m1, m2, p, moments);
      case EstimatorFamily::D12: return Sigma1Estimator::d12(loss, m1, m2, p, moments);
      case EstimatorFamily::Boundary:
        return Sigma1Estimator::boundary(loss, m1, m2, p, moments, quad_tol);
      default: break;
    }
  } else {
    switch (spec.family) {
      case EstimatorFamily::Baee: return Sigma2Estimator::baee(loss, m1, m2, q, moments);
      case EstimatorFamily::D21: return Sigma2Estimator::d21(loss, m1, m2, q, moments);
      case EstimatorFamily::D22: return Sigma2Estimator::d22(loss, m1, m2, q, moments);
      case EstimatorFamily::Boundary:
        return Sigma2Estimator::boundary(loss, m1, m2, q, moments, quad_tol);
      default: break;
    }
  }
  throw StructuralError("make_estimator: family does not match target in " + spec.name());
}

}  // namespace ordvar
