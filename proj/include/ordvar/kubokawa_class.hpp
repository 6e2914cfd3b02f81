#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ordvar/boundary.hpp"
#include "ordvar/estimator.hpp"

namespace ordvar {

/// Boundary estimator: phi*(Z1) S1 for sigma1, psi*(Z1*) S2 for sigma2.
inline Estimator bz_estimator(Target target, LossKind loss, int m1, int m2,
                              const MixingMoments& moments, double quad_tol = kDefaultQuadTol) {
  if (target == Target::Sigma1) return Sigma1Estimator::boundary(loss, m1, m2, 1, moments, quad_tol);
  return Sigma2Estimator::boundary(loss, m1, m2, 1, moments, quad_tol);
}

enum class ViolationKind { Monotonicity, Limit, Boundary };

inline std::string_view violation_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::Monotonicity: return "monotonicity";
    case ViolationKind::Limit: return "limit";
    case ViolationKind::Boundary: return "boundary";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  double point;
  double candidate;
  double reference;  // previous value, limit, or boundary value
};

struct MembershipPoint {
  double point;
  double candidate;
  double boundary;
};

struct MembershipOptions {
  double monotone_slack = 1e-10;
  double boundary_slack = 1e-10;
  double limit_tol = 1e-3;
  double quad_tol = kDefaultQuadTol;
};

struct MembershipReport {
  Target target;
  LossKind loss;
  double limit = 0.0;            // BAEE coefficient the candidate must approach
  double limit_point = 0.0;      // grid extreme on the limit side
  double limit_deviation = 0.0;  // relative deviation of the candidate there
  std::vector<MembershipPoint> points;
  std::vector<Violation> violations;

  bool passed() const noexcept { return violations.empty(); }
};

/// Checks a candidate phi (sigma1) or psi (sigma2) against the class
/// conditions on a grid: nondecreasing, approaches the BAEE coefficient at the
/// grid extreme (largest point for sigma1, smallest for sigma2) at least as
/// closely as the boundary does, and lies above phi* / below psi*.
inline MembershipReport check_class_membership(const std::function<double(double)>& candidate,
                                               Target target, LossKind loss, int m1, int m2,
                                               const MixingMoments& moments,
                                               std::span<const double> grid,
                                               const MembershipOptions& opts = {}) {
  if (grid.empty()) throw StructuralError("check_class_membership: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      throw StructuralError("check_class_membership: grid points must be positive and finite");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw StructuralError("check_class_membership: grid must be strictly increasing");
    }
  }
  const BoundaryFunction boundary(target, loss, m1, m2, moments, opts.quad_tol);
  MembershipReport report{target, loss, boundary.limit(), 0.0, 0.0, {}, {}};

  double previous = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = grid[i];
    const double value = candidate(w);
    const double bound = boundary.uncached(w);
    report.points.push_back({w, value, bound});
    if (i > 0 && value < previous - opts.monotone_slack) {
      report.violations.push_back({ViolationKind::Monotonicity, w, value, previous});
    }
    const double slack = opts.boundary_slack * std::max(1.0, std::fabs(bound));
    const bool outside = target == Target::Sigma1 ? value < bound - slack : value > bound + slack;
    if (outside) report.violations.push_back({ViolationKind::Boundary, w, value, bound});
    previous = value;
  }

  const auto& extreme = target == Target::Sigma1 ? report.points.back() : report.points.front();
  report.limit_point = extreme.point;
  report.limit_deviation = std::fabs(extreme.candidate - report.limit) / report.limit;
  const double boundary_deviation = std::fabs(extreme.boundary - report.limit) / report.limit;
  if (report.limit_deviation > boundary_deviation + opts.limit_tol) {
    report.violations.push_back(
        {ViolationKind::Limit, extreme.point, extreme.candidate, report.limit});
  }
  return report;
}

}  // namespace ordvar
