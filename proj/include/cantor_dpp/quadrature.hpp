#ifndef CANTOR_DPP_QUADRATURE_HPP
#define CANTOR_DPP_QUADRATURE_HPP

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <type_traits>
#include <vector>

namespace cantor_dpp {

inline double error_norm(double v) { return std::abs(v); }
inline double error_norm(const std::complex<double>& v) { return std::abs(v); }
template <typename Derived>
double error_norm(const Eigen::MatrixBase<Derived>& v) {
  return v.cwiseAbs().maxCoeff();
}

template <typename Value>
struct QuadratureResult {
  Value value;
  double error = 0.0;
  int panels = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_panels = 200000;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Value>
struct Panel {
  double a;
  double b;
  Value value;
  double error;
};

template <typename Value, typename F>
Panel<Value> gauss_kronrod_15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Value fc = f(centre);
  Value kronrod = fc * kKronrodWeights[7];
  Value gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const Value sum = f(centre - dx) + f(centre + dx);
    kronrod = kronrod + sum * kKronrodWeights[j];
    if (j % 2 == 1) gauss = gauss + sum * kGaussWeights[j / 2];
  }
  Value k = kronrod * half;
  const Value g = gauss * half;
  const double err = error_norm(Value(k - g));
  return {a, b, k, err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod quadrature over [b_0, b_1] u [b_1, b_2] ...
// The worst panel is bisected until the summed |K15 - G7| estimate drops below
// max(abs_tol, rel_tol * |I|) or the panel budget runs out.
template <typename F>
auto integrate(F&& f, std::span<const double> breakpoints, const QuadratureOptions& opt)
    -> QuadratureResult<std::decay_t<std::invoke_result_t<F&, double>>> {
  using Value = std::decay_t<std::invoke_result_t<F&, double>>;
  using detail::Panel;
  auto worse = [](const Panel<Value>& l, const Panel<Value>& r) { return l.error < r.error; };
  std::priority_queue<Panel<Value>, std::vector<Panel<Value>>, decltype(worse)> heap(worse);

  QuadratureResult<Value> result;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    auto p = detail::gauss_kronrod_15<Value>(f, breakpoints[i], breakpoints[i + 1]);
    total_error += p.error;
    heap.push(std::move(p));
  }
  auto current_value = [&heap]() {
    auto copy = heap;
    Value sum = copy.top().value;
    copy.pop();
    while (!copy.empty()) {
      sum = sum + copy.top().value;
      copy.pop();
    }
    return sum;
  };
  if (heap.empty()) {
    result.value = Value(f(breakpoints.front()) * 0.0);
    result.converged = true;
    return result;
  }

  Value estimate = current_value();
  int evaluations_since_sync = 0;
  while (true) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * error_norm(estimate));
    if (total_error <= target) {
      result.converged = true;
      break;
    }
    if (static_cast<int>(heap.size()) >= opt.max_panels) break;
    Panel<Value> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // panel cannot be bisected further
    heap.pop();
    auto left = detail::gauss_kronrod_15<Value>(f, worst.a, mid);
    auto right = detail::gauss_kronrod_15<Value>(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    estimate = estimate + (left.value + right.value - worst.value);
    heap.push(std::move(left));
    heap.push(std::move(right));
    if (++evaluations_since_sync == 512) {
      // resynchronise the running sums to avoid drift
      evaluations_since_sync = 0;
      total_error = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        total_error += copy.top().error;
        copy.pop();
      }
      estimate = current_value();
    }
  }

  std::vector<Panel<Value>> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  Value sum = panels.front().value;
  double err = panels.front().error;
  for (std::size_t i = 1; i < panels.size(); ++i) {
    sum = sum + panels[i].value;
    err += panels[i].error;
  }
  result.value = sum;
  result.error = err;
  result.panels = static_cast<int>(panels.size());
  result.converged = result.converged || err <= std::max(opt.abs_tol, opt.rel_tol * error_norm(sum));
  return result;
}

template <typename F>
auto integrate(F&& f, double a, double b, const QuadratureOptions& opt) {
  const std::array<double, 2> ends{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(ends), opt);
}

}  // namespace cantor_dpp

#endif  // CANTOR_DPP_QUADRATURE_HPP
