#include "cantor_dpp/errors.hpp"
#include "cantor_dpp/rigidity.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace cantor_dpp;

namespace {

std::shared_ptr<const CantorSet> make(const CantorSpec& spec) {
  return std::make_shared<const CantorSet>(CantorSet::build(spec));
}

// int over R of f on a piecewise-smooth partition
double piecewise(const std::function<double(double)>& f, std::vector<double> cuts, int panels = 4) {
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += oracle::composite_gl(f, cuts[i], cuts[i + 1], panels);
  return s;
}

double weight(double s, double delta) { return 1.0 + std::pow(std::log1p(s), delta); }

// int_a^inf w(u) / u^2 du with u = a e^v
double tail_oracle(double a, double delta) {
  return oracle::composite_gl([&](double v) { return weight(a * std::exp(v), delta) * std::exp(-v) / a; }, 0.0, 80.0,
                              800);
}

// 2 int_0^inf g(s) w(s) / s^2 ds with g built directly from phi
double energy_oracle(const TestFunction& tf, double delta) {
  const double r = tf.r(), R = tf.R();
  auto g = [&](double s) {
    return piecewise([&](double x) { const double d = tf(x) - tf(x - s); return d * d; },
                     {-R, -r, r, R, -R + s, -r + s, r + s, R + s}, 6);
  };
  const double D = 2.0 * R;
  const double near = piecewise([&](double s) { return g(s) * weight(s, delta) / (s * s); }, {0.0, 2 * r, R - r, R + r, D},
                                12);
  return 2.0 * (near + 2.0 * tf.squared_norm() * tail_oracle(D, delta));
}

}  // namespace

TEST_CASE("test function values") {
  const TestFunction tf(1.0, 4.0);
  CHECK(tf(0.0) == 1.0);
  CHECK(tf(1.0) == 1.0);
  CHECK(tf(-1.0) == 1.0);
  CHECK(tf(2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(tf(-2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(tf(4.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(tf(7.0) == 0.0);
  CHECK_THROWS_AS(TestFunction(2.0, 1.0), DomainError);
  CHECK_THROWS_AS(TestFunction(0.0, 1.0), DomainError);
}

TEST_CASE("closed-form integrals against quadrature") {
  for (auto [r, R] : {std::pair{1.0, 4.0}, {1.0, 100.0}, {0.3, 2.0}, {2.5, 1000.0}}) {
    const TestFunction tf(r, R);
    std::vector<double> cuts{-R, -r, r, R};
    for (int k = 1; k < 40; ++k) {
      const double x = r + std::expm1(k * std::log1p(R - r) / 40.0);
      cuts.push_back(x);
      cuts.push_back(-x);
    }
    const double i1 = piecewise([&](double x) { return tf(x); }, cuts);
    const double i2 = piecewise([&](double x) { return tf(x) * tf(x); }, cuts);
    CHECK(tf.integral() == doctest::Approx(i1).epsilon(1e-12));
    CHECK(tf.squared_norm() == doctest::Approx(i2).epsilon(1e-12));
  }
}

TEST_CASE("lag profile against direct quadrature") {
  const TestFunction tf(1.0, 6.0);
  const auto p = lag_profile(tf);
  CHECK(p.support_diameter == 12.0);
  CHECK(p.g_inf == doctest::Approx(2.0 * tf.squared_norm()).epsilon(1e-14));
  for (double s : {0.0, 0.1, 1.5, 2.0, 4.9, 7.0, 11.9, 12.0, 30.0}) {
    const double ref = piecewise([&](double x) { const double d = tf(x) - tf(x - s); return d * d; },
                                 {-6.0, -1.0, 1.0, 6.0, -6.0 + s, -1.0 + s, 1.0 + s, 6.0 + s}, 8);
    CHECK(std::abs(p.g(s) - ref) <= 1e-9);
    CHECK(p.g(-s) == doctest::Approx(p.g(s)));
  }
  const auto ind = indicator_lag_profile(0.0, 3.0);
  CHECK(ind.g(1.0) == 2.0);
  CHECK(ind.g(5.0) == 6.0);
  CHECK(ind.g_inf == 6.0);
}

TEST_CASE("variance against a two-dimensional quadrature") {
  const auto set = make(CantorSpec::from_ratios({1.0 / 3.0}, 6));
  const Kernel k(set, Component::I);
  const TestFunction tf(1.0, 3.0);
  const auto v = variance_linear_statistic(k, tf, 1e-9);
  // V = m |phi|^2 - iint phi(x) phi(y) |K(x - y)|^2
  const std::vector<double> cuts{-3.0, -1.0, 1.0, 3.0};
  const double cross = piecewise(
      [&](double x) {
        return tf(x) * piecewise([&](double y) { return tf(y) * std::norm(k.lag(x - y).value); }, cuts, 10);
      },
      cuts, 10);
  const double ref = k.diagonal() * tf.squared_norm() - cross;
  CHECK(v.value == doctest::Approx(ref).epsilon(1e-7));
  CHECK(v.error <= 1e-8);
  CHECK(v.value > 0.0);
}

TEST_CASE("count variance of an interval") {
  const auto set = make(CantorSpec::theorem2(0.5, 0.5));
  const Kernel k(set, Component::C);
  const double L = 4.0;
  const auto v = variance_from_profile(k, indicator_lag_profile(0.0, L), 1e-9);
  const double cross = oracle::composite_gl(
      [&](double x) {
        return oracle::composite_gl([&](double y) { return std::norm(k.lag(x - y).value); }, 0.0, L, 16);
      },
      0.0, L, 16);
  CHECK(v.value == doctest::Approx(k.diagonal() * L - cross).epsilon(1e-8));
}

TEST_CASE("variance decreases with R") {
  const auto set = make(CantorSpec::theorem2(0.5, 0.5));
  for (auto which : {Component::C, Component::I}) {
    const Kernel k(set, which);
    double prev = INFINITY;
    for (double R : {10.0, 100.0, 1000.0}) {
      const double v = variance_linear_statistic(k, TestFunction(1.0, R), 1e-7).value;
      CHECK(v < prev);
      CHECK(v > 0.0);
      prev = v;
    }
  }
}

TEST_CASE("split point") {
  CHECK(split_point(0.5, 10.0, 0.0) == doctest::Approx(std::log2(11.0)).epsilon(1e-15));
  double prev = 0.0;
  for (double xi : {0.0, 1.0, 10.0, 1e3, 1e6}) {
    const double a = split_point(0.5, 10.0, xi);
    CHECK(a > prev);
    prev = a;
    CHECK(std::exp2(std::floor(a)) - 1.0 <= 10.0 * (1.0 + std::pow(std::log1p(xi), 0.25)) * (1 + 1e-14));
  }
  CHECK(split_point(0.5, 4.0, 7.0) < split_point(0.5, 8.0, 7.0));
}

TEST_CASE("decay check on theorem2 sets") {
  for (double theta : {0.0, 0.5}) {
    const auto set = CantorSet::build(CantorSpec::theorem2(theta, 0.5));
    const auto rep = decay_check(set, 0.5, 1e4, {.xi_min = 1e-2, .points = 300});
    CHECK(rep.xi_grid.size() == 300);
    CHECK(rep.A_verified);
    CHECK(rep.summable);
    CHECK(rep.summability_warning.empty());
    CHECK(rep.kappa_finite);
    CHECK(rep.series_violations == 0);
    CHECK(rep.lambda_violations_I == 0);
    CHECK(rep.lambda_violations_C == 0);
    CHECK(rep.holds());
    CHECK(rep.lambda_C > rep.lambda_I);
    CHECK(rep.ratio_sup_I <= rep.lambda_I);
    for (std::size_t i = 0; i < rep.xi_grid.size(); ++i) {
      CHECK(rep.series_lhs[i] <= rep.series_rhs[i] + rep.series_slack[i] + 1e-12 * rep.series_rhs[i]);
    }
  }
}

TEST_CASE("middle thirds is flagged as not summable") {
  const auto set = CantorSet::build(CantorSpec::from_ratios({1.0 / 3.0}, 30));
  const auto rep = decay_check(set, 0.5, 100.0, {.points = 50});
  CHECK_FALSE(rep.summable);
  CHECK_FALSE(rep.summability_warning.empty());
}

TEST_CASE("outer weight tail") {
  for (double a : {0.5, 2.0, 101.0, 1e4}) {
    for (double delta : {0.3, 0.5, 0.8}) {
      CHECK(outer_weight_tail(a, delta) == doctest::Approx(tail_oracle(a, delta)).epsilon(1e-9));
    }
  }
}

TEST_CASE("J bounds and constants") {
  const auto rep = j_integrals(TestFunction(1.0, 101.0), 0.5);
  CHECK(rep.bounds[2] == doctest::Approx(0.84).epsilon(1e-12));
  CHECK(rep.within_bounds());
  for (int i = 0; i < 4; ++i) {
    CHECK(rep.J[i] > 0.0);
    CHECK(rep.J[i] <= rep.bounds[i]);
  }
  const double h2 = oracle::composite_gl(
      [](double u) { const double v = u == 0.0 ? 1.0 : u / (2.0 * std::sinh(u / 2.0)); return v * v; }, 0.0, 80.0, 400);
  CHECK(2.0 * h2 == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi / 3.0).epsilon(1e-12));
  const double l2 =
      oracle::composite_gl([](double t) { return t * t * std::exp(t) / (std::expm1(t) * std::expm1(t)); }, 1e-12, 80.0, 400);
  CHECK(l2 == doctest::Approx(std::numbers::pi * std::numbers::pi / 3.0).epsilon(1e-9));
}

TEST_CASE("weighted energy against the lag-profile oracle") {
  for (double R : {5.0, 20.0}) {
    const TestFunction tf(1.0, R);
    const auto rep = j_integrals(tf, 0.5);
    CHECK(rep.weighted_energy() == doctest::Approx(energy_oracle(tf, 0.5)).epsilon(1e-6));
    CHECK(rep.weighted_energy_error() <= 1e-6 * rep.weighted_energy());
  }
}

TEST_CASE("J1 against a tensor quadrature in log coordinates") {
  // x = r - 1 + e^a on the annulus r < x < R, both sides
  const double r = 1.0;
  for (double R : {11.0, 101.0}) {
    const double Lg = std::log1p(R - r);
    auto inner = [&](double a) {
      const double x = r - 1.0 + std::exp(a);
      auto f = [&](double b) {
        const double y = r - 1.0 + std::exp(b);
        const double num = (a - b) * (a - b) / (Lg * Lg);
        const double same = a == b ? weight(0.0, 0.5) / (Lg * Lg * std::exp(2.0 * a))
                                   : num / ((x - y) * (x - y)) * weight(std::abs(x - y), 0.5);
        const double opp = num / ((x + y) * (x + y)) * weight(x + y, 0.5);
        return (same + opp) * std::exp(a + b);
      };
      return oracle::composite_gl(f, 0.0, a, 24) + oracle::composite_gl(f, a, Lg, 24);
    };
    const double ref = 2.0 * oracle::composite_gl(inner, 0.0, Lg, 60);  // full square, both orderings
    CHECK(j_integrals(TestFunction(r, R), 0.5).J[0] == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("J pieces shrink as R grows") {
  double prev = INFINITY;
  for (double R : {10.0, 100.0, 1000.0, 10000.0}) {
    const auto rep = j_integrals(TestFunction(1.0, R), 0.5);
    CHECK(rep.within_bounds());
    CHECK(rep.weighted_energy() < prev);  // the sum decreases even where J1 alone does not
    prev = rep.weighted_energy();
  }
}

TEST_CASE("log-Lipschitz constant") {
  const double c1 = estimate_log_lipschitz(1.0);
  CHECK(c1 <= 1.0 + 1e-12);
  CHECK(c1 >= 0.98);
  const double c3 = estimate_log_lipschitz(3.0);
  CHECK(c3 <= 3.0 + 1e-12);
  CHECK(c3 >= 2.8);
}
