#include "cantor_dpp/rigidity.hpp"

#include "cantor_dpp/errors.hpp"
#include "cantor_dpp/numeric.hpp"
#include "cantor_dpp/quadrature.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace cantor_dpp {

namespace {

constexpr double kPi = std::numbers::pi;

// log^delta(1 + d), d >= 0
double log_power(double d, double delta) { return d > 0.0 ? std::pow(std::log1p(d), delta) : 0.0; }

double weight(double d, double delta) { return 1.0 + log_power(std::abs(d), delta); }

std::vector<double> sorted_unique(std::vector<double> v, double lo, double hi) {
  v.push_back(lo);
  v.push_back(hi);
  std::erase_if(v, [&](double x) { return !(x >= lo && x <= hi); });
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

template <typename F>
QuadratureResult<double> integrate_or_throw(F&& f, std::span<const double> breaks, const QuadratureOptions& opt,
                                            const char* what) {
  auto r = integrate(std::forward<F>(f), breaks, opt);
  if (!r.converged) throw AccuracyError(std::string(what) + ": tolerance not reached", r.value, r.error);
  return r;
}

}  // namespace

TestFunction::TestFunction(double r, double R) : r_(r), R_(R) {
  if (!(r > 0.0) || !(R > r) || !std::isfinite(R)) throw DomainError("test function requires 0 < r < R < inf");
  log_span_ = std::log1p(R - r);
}

double TestFunction::operator()(double x) const {
  const double a = std::abs(x);
  if (a <= r_) return 1.0;
  if (a >= R_) return 0.0;
  return 1.0 - std::log1p(a - r_) / log_span_;
}

double TestFunction::integral() const {
  const double T = R_ - r_;
  return 2.0 * r_ + 2.0 * (T - ((1.0 + T) * log_span_ - T) / log_span_);
}

double TestFunction::squared_norm() const {
  // int_1^U (1 - log u / L)^2 du = 2U/L^2 - 1 - 2/L - 2/L^2 with U = e^L
  const double L = log_span_;
  const double U = 1.0 + (R_ - r_);
  return 2.0 * r_ + 2.0 * (2.0 * U / (L * L) - 1.0 - 2.0 / L - 2.0 / (L * L));
}

LagProfile lag_profile(const TestFunction& tf, double tol) {
  const double r = tf.r();
  const double R = tf.R();
  LagProfile p;
  p.support_diameter = 2.0 * R;
  p.g_inf = 2.0 * tf.squared_norm();
  p.kinks = sorted_unique({2.0 * r, R - r, R + r}, 0.0, 2.0 * R);
  p.kinks.erase(p.kinks.begin());
  p.kinks.pop_back();
  p.g = [tf, tol, R, r, g_inf = p.g_inf](double s) {
    s = std::abs(s);
    if (s >= 2.0 * R) return g_inf;
    if (s == 0.0) return 0.0;
    const auto breaks = sorted_unique({-r, r, -R + s, -r + s, r + s}, -R, R + s);
    QuadratureOptions opt;
    opt.abs_tol = tol;
    opt.rel_tol = 1e-13;
    auto f = [&](double x) {
      const double d = tf(x) - tf(x - s);
      return d * d;
    };
    return integrate_or_throw(f, breaks, opt, "lag profile").value;
  };
  return p;
}

LagProfile indicator_lag_profile(double a, double b) {
  if (!(a < b)) throw DomainError("indicator profile requires a < b");
  const double L = b - a;
  LagProfile p;
  p.support_diameter = L;
  p.g_inf = 2.0 * L;
  p.g = [L](double s) { return 2.0 * std::min(std::abs(s), L); };
  return p;
}

VarianceResult variance_from_profile(const Kernel& kernel, const LagProfile& profile, double tol) {
  if (!(tol > 0.0)) throw DomainError("variance tolerance must be positive");
  const double D = profile.support_diameter;
  const double g_inf = profile.g_inf;

  // unit panels resolve the O(1)-period oscillation of |K|^2
  std::vector<double> breaks = profile.kinks;
  const double step = D > 4096.0 ? 1.0 : 0.5;
  for (double s = 0.0; s < D; s += step) breaks.push_back(s);
  breaks = sorted_unique(std::move(breaks), 0.0, D);

  auto f = [&](double s) -> Eigen::Vector2d {
    const double k2 = std::norm(kernel.lag(s).value);
    return {k2 * profile.g(s), g_inf * k2};
  };
  QuadratureOptions opt;
  opt.abs_tol = 0.25 * tol;
  opt.max_panels = std::max<int>(400000, static_cast<int>(4 * breaks.size()));
  const auto res = integrate(f, breaks, opt);

  // Plancherel: int_0^inf |K|^2 = m/2 for the evaluated set
  const double m = kernel.evaluated_measure();
  VarianceResult out;
  out.value = res.value(0) + (0.5 * g_inf * m - res.value(1));
  out.panels = res.panels;

  // evaluated transform differs from the true one by at most rho in modulus
  const double rho = kernel.tail_radius();
  const double truncation = (2.0 * m * rho + rho * rho) * D * g_inf + 0.5 * g_inf * rho;
  out.error = res.error + truncation;
  if (!res.converged || out.error > tol) throw AccuracyError("variance quadrature did not converge", out.value, out.error);
  out.value = std::max(out.value, 0.0);
  return out;
}

VarianceResult variance_linear_statistic(const Kernel& kernel, const TestFunction& tf, double tol) {
  return variance_from_profile(kernel, lag_profile(tf, 1e-3 * tol / (1.0 + tf.R())), tol);
}

double split_point(double delta, double A, double xi) {
  if (!(A > 0.0)) throw DomainError("split constant A must be positive");
  return std::log(1.0 + A * (1.0 + log_power(std::abs(xi), 0.5 * delta))) / std::numbers::ln2;
}

std::optional<double> choose_split_constant(double delta, const std::vector<double>& xi_grid, int max_level) {
  for (int k = 0; k <= 30; ++k) {
    const double A = std::ldexp(1.0, k);
    bool ok = true;
    for (double xi : xi_grid) {
      const double lx = std::log1p(std::abs(xi));
      const double rhs = std::log((A + 1.0) * (1.0 + log_power(std::abs(xi), 0.5 * delta)));
      const int first = static_cast<int>(std::floor(split_point(delta, A, xi))) + 1;
      for (int n = first; n <= std::max(first, max_level); ++n) {
        const double exponent = n * std::exp(-n * 2.0 * std::numbers::ln2 / delta);  // n / 4^{n/delta}
        if (exponent * lx > rhs) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return A;
  }
  return std::nullopt;
}

DecayReport decay_check(const CantorSet& set, double delta, double xi_max, const DecayOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("decay check requires delta in (0,1)");
  if (!(options.xi_min > 0.0) || !(xi_max > options.xi_min)) throw DomainError("decay check requires 0 < xi_min < xi_max");
  if (options.points < 2) throw DomainError("decay check requires at least two grid points");

  DecayReport rep;
  rep.delta = delta;
  const int points = options.points;
  rep.xi_grid.resize(points);
  const double lo = std::log(options.xi_min);
  const double hi = std::log(xi_max);
  for (int i = 0; i < points; ++i) rep.xi_grid[i] = std::exp(lo + (hi - lo) * i / (points - 1));
  rep.xi_grid.back() = xi_max;

  const int K = set.analytic_levels();
  if (options.A) {
    if (!(*options.A > 0.0)) throw DomainError("split constant A must be positive");
    rep.A = *options.A;
    rep.A_verified = choose_split_constant(delta, rep.xi_grid, K).value_or(INFINITY) <= rep.A;
  } else if (auto A = choose_split_constant(delta, rep.xi_grid, K)) {
    rep.A = *A;
    rep.A_verified = true;
  } else {
    rep.A = 16.0;
    rep.A_verified = false;
  }

  // root terms l_n^{1/4^{n/delta}} and the kappa series sum_n (2 root_n)^n, in log2
  double log2_series = -INFINITY;
  double last_log2_term = -INFINITY;
  double prev_log2_term = -INFINITY;
  rep.root_terms.reserve(K);
  for (int n = 1; n <= K; ++n) {
    const double log2_root = set.log2_root_length(n, delta);
    rep.root_terms.push_back(std::exp2(log2_root));
    prev_log2_term = last_log2_term;
    last_log2_term = n * (1.0 + log2_root);
    log2_series = log2_add(log2_series, last_log2_term);
  }
  const double last_root = rep.root_terms.empty() ? 1.0 : rep.root_terms.back();
  const double last_ratio = rep.root_terms.size() >= 2 ? rep.root_terms.back() / rep.root_terms[rep.root_terms.size() - 2] : 1.0;
  rep.summable = last_root <= 0.5 && last_ratio <= 0.9;
  if (!rep.summable) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "summability hypothesis fails: l_n^(1/4^(n/delta)) = %.6g at n = %d does not tend to 0",
                  last_root, K);
    rep.summability_warning = buf;
  }
  // past level K the terms (2 root_n)^n fall at least geometrically once 2 root_n <= 1/2 and
  // root_n decreases, so the remainder is at most the last term
  const bool tail_certified = rep.summable && last_log2_term - prev_log2_term <= -1.0 && last_log2_term / K <= -1.0;
  if (tail_certified) log2_series = log2_add(log2_series, last_log2_term);
  rep.kappa_series = std::exp2(log2_series);
  rep.kappa_finite = tail_certified && std::isfinite(rep.kappa_series);
  rep.kappa = rep.A + 0.5 * kPi * (rep.A + 1.0) * rep.kappa_series;

  const int N = set.levels();
  std::vector<double> lengths(N);
  for (int n = 1; n <= N; ++n) lengths[n - 1] = set.length(n);

  rep.series_lhs.resize(points);
  rep.series_rhs.resize(points);
  rep.series_slack.resize(points);
  rep.ratio_I.resize(points);
  rep.ratio_C.resize(points);
  for (int i = 0; i < points; ++i) {
    const double xi = rep.xi_grid[i];
    const double s = 1.0 + log_power(xi, 0.5 * delta);
    const double w = 1.0 + log_power(xi, delta);
    rep.multiplier = std::max(rep.multiplier, s * s / w);

    CompensatedSum<double> lhs;
    for (int n = 1; n <= N; ++n) lhs += std::ldexp(std::abs(sin_pi(lengths[n - 1] * xi)), n - 1);
    rep.series_lhs[i] = lhs.value();
    rep.series_rhs[i] = rep.kappa * s;
    // sum_{n>N} 2^{n-1} min(1, pi l_n xi) <= pi xi * tail_radius
    rep.series_slack[i] = std::min(kPi * xi * tail_radius(set, xi), set.tail_measure() * kPi * xi);

    const FourierValue fi = transform_I(set, xi, LevelSum::factorized);
    const FourierValue fc = transform_C(set, xi, LevelSum::factorized);
    rep.ratio_I[i] = std::norm(fi.value) * xi * xi / w;
    rep.ratio_C[i] = std::norm(fc.value) * xi * xi / w;
    if (rep.ratio_I[i] > rep.ratio_sup_I) {
      rep.ratio_sup_I = rep.ratio_I[i];
      rep.argmax_I = xi;
    }
    if (rep.ratio_C[i] > rep.ratio_sup_C) {
      rep.ratio_sup_C = rep.ratio_C[i];
      rep.argmax_C = xi;
    }
  }
  rep.lambda_I = rep.kappa * rep.kappa * rep.multiplier / (kPi * kPi);
  rep.lambda_C = (1.0 + rep.kappa) * (1.0 + rep.kappa) * rep.multiplier / (kPi * kPi);

  for (int i = 0; i < points; ++i) {
    const double xi = rep.xi_grid[i];
    const double w = 1.0 + log_power(xi, delta);
    const double rho = tail_radius(set, xi);
    const double slack_I = (2.0 * std::sqrt(rep.ratio_I[i] * w) / xi * rho + rho * rho) * xi * xi / w;
    const double slack_C = (2.0 * std::sqrt(rep.ratio_C[i] * w) / xi * rho + rho * rho) * xi * xi / w;
    const double rel = 1e-12;
    if (rep.series_lhs[i] > rep.series_rhs[i] * (1.0 + rel) + rep.series_slack[i]) ++rep.series_violations;
    if (rep.ratio_I[i] > rep.lambda_I * (1.0 + rel) + slack_I) ++rep.lambda_violations_I;
    if (rep.ratio_C[i] > rep.lambda_C * (1.0 + rel) + slack_C) ++rep.lambda_violations_C;
  }
  return rep;
}

double outer_weight_tail(double a, double delta, double tol) {
  if (!(a > 0.0)) throw DomainError("outer weight tail requires a > 0");
  // int_a^inf log^delta(1 + u) / u^2 du = (1/a) int_0^inf log^delta(1 + a e^s) e^{-s} ds
  const double knee = std::max(0.0, -std::log(a));
  const double S = knee + 60.0;
  const std::array<double, 3> breaks{0.0, knee, S};
  QuadratureOptions opt;
  opt.abs_tol = tol * a;
  opt.rel_tol = 1e-13;
  auto f = [&](double s) { return std::pow(std::log1p(a * std::exp(s)), delta) * std::exp(-s); };
  const auto r = integrate_or_throw(f, breaks, opt, "outer weight tail");
  return 1.0 / a + r.value / a;
}

bool JReport::within_bounds() const {
  for (int i = 0; i < 4; ++i) {
    if (J[i] - error[i] > bounds[i]) return false;
  }
  return true;
}

double estimate_log_lipschitz(double r, int grid) {
  if (!(r > 0.0)) throw DomainError("log-Lipschitz estimate requires r > 0");
  if (grid < 2) throw DomainError("log-Lipschitz estimate requires at least two grid points");
  // |x| from r (1 + 1e-9) to r * 1e9, log-spaced
  std::vector<double> t(grid);
  const double lo = std::log(r) + 1e-9;
  const double hi = std::log(r) + std::log(1e9);
  for (int i = 0; i < grid; ++i) t[i] = std::exp(lo + (hi - lo) * i / (grid - 1));
  double sup = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = i + 1; j < grid; ++j) {
      const double num = std::abs(std::log1p(t[j] - r) - std::log1p(t[i] - r));
      const double den = std::abs(std::log(t[j]) - std::log(t[i]));
      if (den > 0.0) sup = std::max(sup, num / den);
    }
  }
  return sup;
}

JReport j_integrals(const TestFunction& tf, double delta, double tol) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("J integrals require delta in (0,1)");
  if (!(tol > 0.0)) throw DomainError("J integral tolerance must be positive");
  const double r = tf.r();
  const double R = tf.R();
  const double Lg = std::log1p(R - r);
  const double norm = 1.0 / (Lg * Lg);

  JReport rep;
  rep.r = r;
  rep.R = R;
  rep.delta = delta;
  rep.c_r = estimate_log_lipschitz(r);

  QuadratureOptions inner;
  inner.abs_tol = 1e-3 * tol / (1.0 + Lg);
  inner.rel_tol = 1e-13;
  QuadratureOptions outer;
  outer.abs_tol = 0.5 * tol;
  outer.rel_tol = 0.0;

  // |x| = r - 1 + e^a maps (r, R) onto a in (0, Lg)
  const std::array<double, 2> span{0.0, Lg};
  double inner_err = 0.0;
  auto track = [&inner_err](const QuadratureResult<double>& q) {
    inner_err = std::max(inner_err, q.error);
    return q.value;
  };

  // D_1: same-sign quadrants through h(a - b) = ((a - b) / (2 sinh((a - b)/2)))^2,
  // opposite-sign quadrants through |x - y| = 2r - 2 + e^a + e^b; both symmetric in a, b
  {
    inner_err = 0.0;
    auto h = [](double u) {
      if (std::abs(u) < 1e-4) return 1.0 - u * u / 12.0;
      const double q = u / (2.0 * std::sinh(0.5 * u));
      return q * q;
    };
    auto outer_f = [&](double a) {
      if (a <= 0.0) return 0.0;
      const std::array<double, 2> in{0.0, a};
      auto same = [&](double b) { return h(a - b) * weight(std::exp(a) - std::exp(b), delta); };
      auto opp = [&](double b) {
        const double d = 2.0 * r - 2.0 + std::exp(a) + std::exp(b);
        const double u = a - b;
        return u * u * std::exp(a + b) / (d * d) * weight(d, delta);
      };
      return track(integrate_or_throw(same, in, inner, "J1 inner")) +
             track(integrate_or_throw(opp, in, inner, "J1 inner"));
    };
    outer.abs_tol = 0.5 * tol / (8.0 * norm);
    const auto q = integrate_or_throw(outer_f, span, outer, "J1");
    rep.J[0] = 4.0 * norm * q.value;
    rep.error[0] = 4.0 * norm * (q.error + Lg * inner_err);
  }

  // D_2: y = r - 1 + e^b > r, |x| < r; inner over u = y - x = c e^z with c = e^b - 1
  {
    inner_err = 0.0;
    auto outer_f = [&](double b) {
      if (b <= 0.0) return 0.0;
      const double c = std::expm1(b);
      const double zmax = std::log1p(2.0 * r / c);
      const std::array<double, 2> in{0.0, zmax};
      auto g = [&](double z) {
        const double u = c * std::exp(z);
        return log_power(u, delta) / u;
      };
      const double inner_val = (1.0 / c - 1.0 / (c + 2.0 * r)) + track(integrate_or_throw(g, in, inner, "J2 inner"));
      return b * b * std::exp(b) * inner_val;
    };
    outer.abs_tol = 0.5 * tol / (2.0 * norm);
    const auto q = integrate_or_throw(outer_f, span, outer, "J2");
    rep.J[1] = 2.0 * norm * q.value;
    rep.error[1] = 2.0 * norm * (q.error + Lg * inner_err * Lg * Lg * std::exp(Lg));
  }

  const double f_tol = 1e-3 * tol / (1.0 + R);
  auto F = [&](double a) { return outer_weight_tail(a, delta, f_tol); };

  // D_3: int_{|x|<r} int_{|y|>R} = 2 int_{-r}^{r} F(R - x) dx
  {
    const std::array<double, 2> in{-r, r};
    outer.abs_tol = 0.25 * tol;
    const auto q = integrate_or_throw([&](double x) { return F(R - x); }, in, outer, "J3");
    rep.J[2] = 2.0 * q.value;
    rep.error[2] = 2.0 * (q.error + 2.0 * r * f_tol);
  }

  // D_4: 2 norm int_0^Lg (Lg - a)^2 [F(R - x) + F(R + x)] e^a da, R - x = e^Lg - e^a
  {
    auto outer_f = [&](double a) {
      const double x = r - 1.0 + std::exp(a);
      const double near = -std::exp(Lg) * std::expm1(a - Lg);
      if (!(near > 0.0)) return 0.0;
      const double t = Lg - a;
      return t * t * (F(near) + F(R + x)) * std::exp(a);
    };
    outer.abs_tol = 0.25 * tol / (2.0 * norm);
    const auto q = integrate_or_throw(outer_f, span, outer, "J4");
    rep.J[3] = 2.0 * norm * q.value;
    rep.error[3] = 2.0 * norm * (q.error + Lg * Lg * Lg * std::exp(Lg) * 2.0 * f_tol);
  }

  // closed-form majorants; the t-integrals are 2 pi^2/3, pi^2/3, pi^2/3 and
  // M1 = int_1^inf (log t / (t - 1))^2 log(1 + t) dt
  const double pi2 = kPi * kPi;
  const double c2 = rep.c_r * rep.c_r;
  const double logratio = std::log(R) - std::log(r);
  QuadratureOptions mo;
  mo.abs_tol = 1e-13;
  mo.rel_tol = 1e-14;
  // t = e^v, v in (0, inf)
  auto m1_f = [](double v) {
    if (v <= 0.0) return 0.0;
    const double q = v / std::expm1(v);
    return q * q * std::log1p(std::exp(v)) * std::exp(v);
  };
  const std::array<double, 4> mb{0.0, 1.0, 10.0, 80.0};
  const double M1 = integrate_or_throw(m1_f, mb, mo, "M1").value;

  rep.bounds[0] = 4.0 * c2 * (1.0 + log_power(2.0 * R, delta)) * logratio * norm * (2.0 * pi2 / 3.0);
  rep.bounds[1] = 4.0 * r * (1.0 + log_power(R + r, delta)) * norm * (pi2 / 3.0);
  rep.bounds[2] = 4.0 * r * (1.0 / (R - r) + std::pow(R - r, delta - 1.0) / (1.0 - delta));
  rep.bounds[3] = 4.0 * c2 * logratio * norm *
                  ((1.0 + log_power(R, delta)) * pi2 / 3.0 + M1 / std::pow(std::log1p(R), 1.0 - delta));
  return rep;
}

}  // namespace cantor_dpp
