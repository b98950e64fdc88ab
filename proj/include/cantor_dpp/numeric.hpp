#ifndef CANTOR_DPP_NUMERIC_HPP
#define CANTOR_DPP_NUMERIC_HPP

#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <numbers>

namespace cantor_dpp {

// sin(pi x) and cos(pi x) with exact argument reduction, so integer and
// half-integer arguments give exact zeros.
template <std::floating_point Real>
Real sin_pi(Real x) {
  const Real pi = std::numbers::pi_v<Real>;
  Real r = std::remainder(x, Real(2));  // exact, r in [-1, 1]
  if (r > Real(0.5)) {
    r = Real(1) - r;
  } else if (r < Real(-0.5)) {
    r = Real(-1) - r;
  }
  return std::sin(pi * r);
}

template <std::floating_point Real>
Real cos_pi(Real x) {
  const Real pi = std::numbers::pi_v<Real>;
  const Real a = std::abs(std::remainder(x, Real(2)));  // a in [0, 1]
  if (a <= Real(0.25)) return std::cos(pi * a);
  if (a <= Real(0.75)) return std::sin(pi * (Real(0.5) - a));
  return -std::cos(pi * (Real(1) - a));
}

// e^{-2 pi i t}
template <std::floating_point Real>
std::complex<Real> unit_phase(Real t) {
  return {cos_pi(Real(2) * t), -sin_pi(Real(2) * t)};
}

// sin(pi x) / (pi x); three-term Taylor expansion below |x| = 1e-8.
template <std::floating_point Real>
Real sinc_pi(Real x) {
  const Real pi = std::numbers::pi_v<Real>;
  const Real px = pi * x;
  if (std::abs(x) < Real(1e-8)) {
    const Real p2 = px * px;
    return Real(1) - p2 / Real(6) + p2 * p2 / Real(120);
  }
  return sin_pi(x) / px;
}

// Neumaier's variant of Kahan summation.
template <std::floating_point Real>
class CompensatedSum {
 public:
  void add(Real v) {
    const Real t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(Real v) {
    add(v);
    return *this;
  }
  Real value() const { return sum_ + comp_; }

 private:
  Real sum_{0};
  Real comp_{0};
};

template <std::floating_point Real>
class CompensatedComplexSum {
 public:
  void add(std::complex<Real> v) {
    re_.add(v.real());
    im_.add(v.imag());
  }
  CompensatedComplexSum& operator+=(std::complex<Real> v) {
    add(v);
    return *this;
  }
  std::complex<Real> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<Real> re_;
  CompensatedSum<Real> im_;
};

// log2(2^a + 2^b) without leaving log space.
inline double log2_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp2(b - a)) / std::numbers::ln2;
}

// log2(2^a - 2^b) for a >= b; -inf when equal.
inline double log2_sub(double a, double b) {
  if (b == -std::numeric_limits<double>::infinity()) return a;
  if (b >= a) return -std::numeric_limits<double>::infinity();
  return a + std::log1p(-std::exp2(b - a)) / std::numbers::ln2;
}

// 2^v, flushing to zero below the subnormal range.
inline double exp2_or_zero(double log2_value) {
  if (log2_value < -1075.0) return 0.0;
  return std::exp2(log2_value);
}

}  // namespace cantor_dpp

#endif  // CANTOR_DPP_NUMERIC_HPP
