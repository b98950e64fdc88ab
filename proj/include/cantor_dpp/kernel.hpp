#ifndef CANTOR_DPP_KERNEL_HPP
#define CANTOR_DPP_KERNEL_HPP

#include "cantor_dpp/cantor.hpp"
#include "cantor_dpp/fourier.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <string_view>
#include <unordered_map>

namespace cantor_dpp {

// Which set induces the kernel: K_C(x, y) = chi_C^(x - y) or K_I(x, y) = chi_I^(x - y).
enum class Component { C, I };

std::string_view to_string(Component which);
Component component_from_string(std::string_view name);

class Kernel {
 public:
  // Lags are quantized to multiples of 2^-40 before evaluation and caching.
  static constexpr double kLagQuantum = 0x1p-40;

  Kernel(std::shared_ptr<const CantorSet> set, Component which, LevelSum method = LevelSum::factorized);

  const CantorSet& set() const { return *set_; }
  const std::shared_ptr<const CantorSet>& set_ptr() const { return set_; }
  Component which() const { return which_; }

  // m(M) for the chosen set M.
  double diagonal() const;
  // Measure of the truncated set whose transform is actually evaluated;
  // differs from diagonal() by at most the tail measure.
  double evaluated_measure() const;
  double tail_radius() const { return set_->tail_measure(); }

  // chi_M^(s), evaluated directly (no quantization, no cache).
  FourierValue lag(double s) const;

  // K(x, y) through the lag cache. K(y, x) = conj(K(x, y)) holds exactly.
  std::complex<double> operator()(double x, double y) const;

  std::size_t cache_size() const;

 private:
  struct Cache {
    std::shared_mutex mutex;
    std::unordered_map<std::int64_t, std::complex<double>> values;
  };
  static constexpr std::size_t kMaxCacheEntries = std::size_t{1} << 22;

  std::shared_ptr<const CantorSet> set_;
  Component which_;
  LevelSum method_;
  std::shared_ptr<Cache> cache_;
};

inline std::complex<double> kernel_eval(const Kernel& k, double x, double y) { return k(x, y); }

enum class QuadratureRule { trapezoid, gauss };

std::string_view to_string(QuadratureRule rule);
QuadratureRule quadrature_rule_from_string(std::string_view name);

struct NodesAndWeights {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
NodesAndWeights gauss_legendre(int n);
NodesAndWeights window_rule(double half_width, int n, QuadratureRule rule);

// Nystrom discretization sqrt(w_i) K(x_i, x_j) sqrt(w_j) of chi_D K chi_D on D = [-W, W].
struct GramMatrix {
  double window = 0.0;
  QuadratureRule rule = QuadratureRule::trapezoid;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::MatrixXcd entries;
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // columns; empty unless requested
  double eps_proj = 0.0;          // max(-lambda_min, lambda_max - 1, 0)
};

GramMatrix gram(const Kernel& kernel, double half_width, int nodes, QuadratureRule rule = QuadratureRule::trapezoid,
                bool with_eigenvectors = false);

struct ProjectionDefect {
  double eps_proj = 0.0;
  double relative_defect = 0.0;  // ||G^2 - G||_F / ||G||_F
  double trace = 0.0;
};

ProjectionDefect projection_defect(const GramMatrix& g);

}  // namespace cantor_dpp

#endif  // CANTOR_DPP_KERNEL_HPP
