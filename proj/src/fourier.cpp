#include "cantor_dpp/fourier.hpp"

#include "cantor_dpp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cantor_dpp {

std::complex<double> level_transform(const CantorSet& set, int n, double xi, LevelSum method) {
  const double l = set.length(n);
  const double envelope = l * sinc_pi(l * xi);
  const bool enumerate = method == LevelSum::enumerate || (method == LevelSum::automatic && set.enumerated(n));
  if (enumerate) {
    CompensatedComplexSum<double> sum;
    for (double c : set.centres(n)) sum += unit_phase(c * xi);
    return sum.value() * envelope;
  }
  // Centres of C_{n-1} are 1/2 + sum_{j<n} +-d_j/2, so their phases factor
  // into e^{-i pi xi} prod_j 2 cos(pi xi d_j).
  double product = envelope;
  for (int j = 1; j < n; ++j) product *= 2.0 * cos_pi(xi * set.centre_spacing(j));
  return unit_phase(0.5 * xi) * product;
}

double tail_radius(const CantorSet& set, double xi) {
  const double tail = set.tail_measure();
  if (tail == 0.0 || xi == 0.0) return tail;
  const double log2_cap = -std::log2(std::numbers::pi * std::abs(xi));  // 1/(pi |xi|)
  double log2_sum = -std::numeric_limits<double>::infinity();
  const int last = set.analytic_levels();
  for (int n = set.levels() + 1; n <= last; ++n) {
    log2_sum = log2_add(log2_sum, (n - 1) + std::min(set.log2_length_analytic(n), log2_cap));
  }
  if (const auto& c = set.theta_construction()) {
    log2_sum = log2_add(log2_sum, c->log2_mass_after(last));
  } else {
    log2_sum = set.log2_tail_measure();
  }
  return std::min(tail, exp2_or_zero(log2_sum));
}

FourierValue transform_I(const CantorSet& set, double xi, LevelSum method) {
  CompensatedComplexSum<double> sum;
  const std::complex<double> phase = unit_phase(0.5 * xi);
  double product = 1.0;  // prod_{j<n} 2 cos(pi xi d_j), carried across levels
  for (int n = 1; n <= set.levels(); ++n) {
    const bool enumerate = method == LevelSum::enumerate || (method == LevelSum::automatic && set.enumerated(n));
    if (enumerate) {
      sum += level_transform(set, n, xi, LevelSum::enumerate);
    } else {
      const double l = set.length(n);
      sum += phase * (product * l * sinc_pi(l * xi));
    }
    product *= 2.0 * cos_pi(xi * set.centre_spacing(n));
  }
  return {sum.value(), tail_radius(set, xi), xi};
}

FourierValue transform_C(const CantorSet& set, double xi, LevelSum method) {
  const FourierValue i = transform_I(set, xi, method);
  return {transform_interval(0.0, 1.0, xi) - i.value, i.tail_radius, xi};
}

std::complex<double> quadrature_oracle(std::span<const Interval> intervals, double xi, double tol,
                                       int max_panels_per_interval) {
  if (!(tol > 0.0)) throw DomainError("quadrature_oracle requires tol > 0");
  double total = 0.0;
  for (const auto& iv : intervals) {
    if (!(iv.left < iv.right)) throw DomainError("quadrature_oracle requires left < right");
    total += iv.right - iv.left;
  }
  CompensatedComplexSum<double> sum;
  auto integrand = [xi](double x) {
    const double phase = -2.0 * std::numbers::pi * x * xi;
    return std::complex<double>(std::cos(phase), std::sin(phase));
  };
  for (const auto& iv : intervals) {
    QuadratureOptions opt;
    opt.abs_tol = std::max(tol * (iv.right - iv.left) / total, std::numeric_limits<double>::min());
    opt.max_panels = max_panels_per_interval;
    const auto r = integrate(integrand, iv.left, iv.right, opt);
    if (!r.converged) {
      throw AccuracyError("quadrature oracle could not reach the requested tolerance", std::abs(r.value), r.error);
    }
    sum += r.value;
  }
  return sum.value();
}

}  // namespace cantor_dpp
