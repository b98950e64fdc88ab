#ifndef CANTOR_DPP_RIGIDITY_HPP
#define CANTOR_DPP_RIGIDITY_HPP

#include "cantor_dpp/cantor.hpp"
#include "cantor_dpp/kernel.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cantor_dpp {

// phi(x) = 1 on |x| <= r, 1 - log(1 + |x| - r) / log(1 + R - r) on r < |x| < R,
// and 0 on |x| >= R.
class TestFunction {
 public:
  TestFunction(double r, double R);

  double r() const { return r_; }
  double R() const { return R_; }
  double operator()(double x) const;
  // integrals of phi and phi^2, closed form
  double integral() const;
  double squared_norm() const;

 private:
  double r_;
  double R_;
  double log_span_;  // log(1 + R - r)
};

inline double phi_eval(const TestFunction& tf, double x) { return tf(x); }

// Lag profile g(s) = int [f(x) - f(x - s)]^2 dx of a compactly supported f.
// For s >= support_diameter the supports are disjoint and g(s) = g_inf = 2 int f^2.
struct LagProfile {
  std::function<double(double)> g;
  double support_diameter = 0.0;
  double g_inf = 0.0;
  std::vector<double> kinks;  // points in (0, support_diameter) where g is not smooth
};

LagProfile lag_profile(const TestFunction& tf, double tol = 1e-10);
// f = indicator of [a, b]: g(s) = 2 min(|s|, b - a)
LagProfile indicator_lag_profile(double a, double b);

struct VarianceResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

// Var(S_f) = 1/2 iint [f(x) - f(y)]^2 |K(x - y)|^2 dx dy, reduced by translation
// invariance to int_0^D |K(s)|^2 g(s) ds + g_inf int_D^inf |K(s)|^2 ds, where the
// second integral is m(M)/2 - int_0^D |K|^2 (Plancherel). Throws AccuracyError
// when the tolerance cannot be met.
VarianceResult variance_from_profile(const Kernel& kernel, const LagProfile& profile, double tol = 1e-6);
VarianceResult variance_linear_statistic(const Kernel& kernel, const TestFunction& tf, double tol = 1e-6);

// a(xi) = log(1 + A [1 + log^{delta/2}(1 + |xi|)]) / log 2
double split_point(double delta, double A, double xi);

struct DecayReport {
  double delta = 0.5;
  double A = 16.0;
  bool A_verified = false;
  std::vector<double> xi_grid;
  // sum_{n<=N} 2^{n-1} |sin(pi l_n xi)|, kappa [1 + log^{delta/2}(1 + xi)], and the
  // tail allowance sum_{n>N} 2^{n-1} min(1, pi l_n xi)
  std::vector<double> series_lhs;
  std::vector<double> series_rhs;
  std::vector<double> series_slack;
  // |chi^(xi)|^2 xi^2 / (1 + log^delta(1 + xi))
  std::vector<double> ratio_I;
  std::vector<double> ratio_C;
  double ratio_sup_I = 0.0;
  double argmax_I = 0.0;
  double ratio_sup_C = 0.0;
  double argmax_C = 0.0;
  // kappa = A + pi (A + 1) / 2 * sum_n (2 l_n^{1/4^{n/delta}})^n
  double kappa_series = 0.0;
  double kappa = 0.0;
  bool kappa_finite = false;
  double multiplier = 0.0;  // sup over the grid of (1 + L^{delta/2})^2 / (1 + L^delta)
  double lambda_I = 0.0;    // kappa^2 multiplier / pi^2
  double lambda_C = 0.0;    // (1 + kappa)^2 multiplier / pi^2
  int series_violations = 0;
  int lambda_violations_I = 0;
  int lambda_violations_C = 0;
  // summability of sum_n l_n^{1/4^{n/delta}}
  std::vector<double> root_terms;
  bool summable = false;
  std::string summability_warning;

  bool holds() const { return series_violations == 0 && lambda_violations_I == 0 && lambda_violations_C == 0; }
};

struct DecayOptions {
  double xi_min = 1e-2;
  int points = 1000;
  std::optional<double> A;  // searched over powers of two when unset
};

DecayReport decay_check(const CantorSet& set, double delta, double xi_max, const DecayOptions& options = {});

// Smallest power of two A such that (1 + xi)^{n / 4^{n/delta}} <= (A + 1)[1 + log^{delta/2}(1 + xi)]
// for every grid xi and every level n > a(xi); nullopt if none up to 2^30.
std::optional<double> choose_split_constant(double delta, const std::vector<double>& xi_grid, int max_level);

// The four off-diagonal pieces J_{R,1..4} of
// iint [(phi(x) - phi(y)) / (x - y)]^2 [1 + log^delta(1 + |x - y|)] dx dy.
struct JReport {
  double r = 1.0;
  double R = 10.0;
  double delta = 0.5;
  std::array<double, 4> J{};
  std::array<double, 4> error{};
  std::array<double, 4> bounds{};
  double c_r = 1.0;  // numerical estimate of the log-Lipschitz constant c(r)

  // J_1 + 2 (J_2 + J_3 + J_4): the whole integral over R^2
  double weighted_energy() const { return J[0] + 2.0 * (J[1] + J[2] + J[3]); }
  double weighted_energy_error() const { return error[0] + 2.0 * (error[1] + error[2] + error[3]); }
  bool within_bounds() const;
};

JReport j_integrals(const TestFunction& tf, double delta, double tol = 1e-9);

// sup of |log(1 + |x| - r) - log(1 + |y| - r)| / |log|x| - log|y|| over a grid of pairs |x|, |y| > r
double estimate_log_lipschitz(double r, int grid = 400);

// int_a^inf (1 + log^delta(1 + u)) / u^2 du
double outer_weight_tail(double a, double delta, double tol = 1e-13);

}  // namespace cantor_dpp

#endif  // CANTOR_DPP_RIGIDITY_HPP
