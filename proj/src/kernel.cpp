#include "cantor_dpp/kernel.hpp"

#include "cantor_dpp/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <mutex>
#include <numbers>

namespace cantor_dpp {

std::string_view to_string(Component which) { return which == Component::C ? "C" : "I"; }

Component component_from_string(std::string_view name) {
  if (name == "C") return Component::C;
  if (name == "I") return Component::I;
  throw DomainError("unknown kernel component '" + std::string(name) + "' (expected C|I)");
}

std::string_view to_string(QuadratureRule rule) { return rule == QuadratureRule::gauss ? "gauss" : "trapezoid"; }

QuadratureRule quadrature_rule_from_string(std::string_view name) {
  if (name == "trapezoid") return QuadratureRule::trapezoid;
  if (name == "gauss") return QuadratureRule::gauss;
  throw DomainError("unknown quadrature rule '" + std::string(name) + "' (expected trapezoid|gauss)");
}

Kernel::Kernel(std::shared_ptr<const CantorSet> set, Component which, LevelSum method)
    : set_(std::move(set)), which_(which), method_(method), cache_(std::make_shared<Cache>()) {
  if (!set_) throw DomainError("kernel requires a set");
}

double Kernel::diagonal() const { return which_ == Component::C ? set_->measure_C() : set_->measure_I(); }

double Kernel::evaluated_measure() const {
  return which_ == Component::C ? 1.0 - set_->enumerated_measure_I() : set_->enumerated_measure_I();
}

FourierValue Kernel::lag(double s) const {
  return which_ == Component::C ? transform_C(*set_, s, method_) : transform_I(*set_, s, method_);
}

std::complex<double> Kernel::operator()(double x, double y) const {
  const double s = x - y;
  const double a = std::abs(s);
  if (!(a < 0x1p22)) {
    const auto v = lag(a).value;
    return s < 0 ? std::conj(v) : v;
  }
  const std::int64_t key = std::llround(a / kLagQuantum);
  std::complex<double> v;
  bool found = false;
  {
    std::shared_lock lock(cache_->mutex);
    if (auto it = cache_->values.find(key); it != cache_->values.end()) {
      v = it->second;
      found = true;
    }
  }
  if (!found) {
    v = lag(static_cast<double>(key) * kLagQuantum).value;
    std::unique_lock lock(cache_->mutex);
    if (cache_->values.size() < kMaxCacheEntries) cache_->values.emplace(key, v);
  }
  return s < 0 ? std::conj(v) : v;
}

std::size_t Kernel::cache_size() const {
  std::shared_lock lock(cache_->mutex);
  return cache_->values.size();
}

NodesAndWeights gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
  NodesAndWeights r{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes(i) = -x;
    r.nodes(n - 1 - i) = x;
    r.weights(i) = w;
    r.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) r.nodes((n - 1) / 2) = 0.0;
  return r;
}

NodesAndWeights window_rule(double half_width, int n, QuadratureRule rule) {
  if (!(half_width > 0.0)) throw DomainError("window half-width must be positive");
  if (n < 1) throw DomainError("node count must be positive");
  if (n == 1) return {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 2.0 * half_width)};
  if (rule == QuadratureRule::gauss) {
    auto gl = gauss_legendre(n);
    return {gl.nodes * half_width, gl.weights * half_width};
  }
  const double h = 2.0 * half_width / (n - 1);
  NodesAndWeights r{Eigen::VectorXd(n), Eigen::VectorXd::Constant(n, h)};
  for (int i = 0; i < n; ++i) r.nodes(i) = -half_width + i * h;
  r.nodes(n - 1) = half_width;
  r.weights(0) = r.weights(n - 1) = 0.5 * h;
  return r;
}

GramMatrix gram(const Kernel& kernel, double half_width, int nodes, QuadratureRule rule, bool with_eigenvectors) {
  GramMatrix g;
  g.window = half_width;
  g.rule = rule;
  auto nw = window_rule(half_width, nodes, rule);
  if ((nw.weights.array() <= 0.0).any()) throw DomainError("quadrature rule produced non-positive weights");
  g.nodes = std::move(nw.nodes);
  g.weights = std::move(nw.weights);

  const Eigen::Index n = g.nodes.size();
  const Eigen::VectorXd sw = g.weights.cwiseSqrt();
  g.entries.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    g.entries(j, j) = sw(j) * kernel(g.nodes(j), g.nodes(j)) * sw(j);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const std::complex<double> v = sw(i) * kernel(g.nodes(i), g.nodes(j)) * sw(j);
      g.entries(i, j) = v;
      g.entries(j, i) = std::conj(v);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      g.entries, with_eigenvectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("Gram eigen-solve failed");
  g.eigenvalues = solver.eigenvalues();
  if (with_eigenvectors) g.eigenvectors = solver.eigenvectors();
  g.eps_proj = std::max({-g.eigenvalues.minCoeff(), g.eigenvalues.maxCoeff() - 1.0, 0.0});
  return g;
}

ProjectionDefect projection_defect(const GramMatrix& g) {
  if (g.eigenvalues.size() != g.entries.rows()) throw NumericError("Gram matrix has no spectrum");
  const Eigen::ArrayXd lam = g.eigenvalues.array();
  ProjectionDefect d;
  d.eps_proj = std::max({-lam.minCoeff(), lam.maxCoeff() - 1.0, 0.0});
  const double norm = std::sqrt(lam.square().sum());
  d.relative_defect = norm > 0.0 ? std::sqrt((lam.square() - lam).square().sum()) / norm : 0.0;
  d.trace = g.entries.diagonal().real().sum();
  return d;
}

}  // namespace cantor_dpp
