#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "ordvar/errors.hpp"

namespace ordvar::quad {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

// Kronrod abscissae on [0, 1] of the symmetric 15-point rule; odd indices are
// the 7-point Gauss nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

// One G7-K15 panel with the QUADPACK error heuristic.
template <class F>
Segment gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_center = f(center);
  double kronrod = f_center * kWgk[7];
  double gauss = f_center * kWg[3];
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    kronrod += kWgk[j] * (f1[j] + f2[j]);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * kronrod;
  double asc = kWgk[7] * std::fabs(f_center - mean);
  double abs_k = kWgk[7] * std::fabs(f_center);
  for (int j = 0; j < 7; ++j) {
    asc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));
    abs_k += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
  }
  const double value = kronrod * half;
  asc *= std::fabs(half);
  abs_k *= std::fabs(half);
  double err = std::fabs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (abs_k > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * abs_k, err);
  }
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over the finite
/// interval [a, b]: the panel with the largest error estimate is bisected
/// until the summed estimate falls below abs_tol.
template <class F>
QuadratureResult integrate_gk(F&& f, double a, double b, double abs_tol,
                              int max_intervals = 4000) {
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int intervals = 1;
  while (total_err > abs_tol && intervals < max_intervals) {
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum from the panels to drop accumulated cancellation in the running totals.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {value, err, intervals, err <= abs_tol};
}

/// Integral of f over [0, inf) through the map v = x / (1 - x), x in [0, 1).
template <class F>
QuadratureResult integrate_gk_semi_infinite(F&& f, double abs_tol, int max_intervals = 4000) {
  auto mapped = [&f](double x) {
    const double one_minus = 1.0 - x;
    if (one_minus <= 0.0) return 0.0;
    const double v = x / one_minus;
    return f(v) / (one_minus * one_minus);
  };
  return integrate_gk(mapped, 0.0, 1.0, abs_tol, max_intervals);
}

}  // namespace ordvar::quad
