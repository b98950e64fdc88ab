#ifndef CANTOR_DPP_SAMPLER_HPP
#define CANTOR_DPP_SAMPLER_HPP

#include "cantor_dpp/kernel.hpp"
#include "cantor_dpp/rigidity.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace cantor_dpp {

struct SampleConfig {
  Component which = Component::C;
  double window = 10.0;  // half-width W
  int nodes = 600;
  int replicates = 1;
  std::uint64_t seed = 0;
  QuadratureRule rule = QuadratureRule::trapezoid;
  int threads = 0;  // 0: CANTOR_DPP_THREADS or hardware concurrency

  void validate() const;
};

struct PointSample {
  std::vector<double> points;  // strictly increasing, inside [-W, W]
  std::uint64_t seed_used = 0;
  int replicate = 0;
  int selected = 0;  // number of eigenvectors kept by the Bernoulli step
  int eigen_clamp_events = 0;
};

struct SampleRun {
  std::vector<PointSample> samples;  // ordered by replicate
  double window = 0.0;
  double eps_proj = 0.0;
  double expected_count = 0.0;  // trace of the Gram matrix
  int clamp_events = 0;         // eigenvalues moved into [0, 1]
  bool clamp_warning = false;   // some excursion exceeded 1e-3
};

// Above this projection defect the Gram matrix is considered under-resolved.
inline constexpr double kMaxProjectionDefect = 0.1;
// Eigenvalue excursions beyond this are clamped with a warning.
inline constexpr double kClampWarning = 1e-3;

int worker_threads(int requested = 0);

SampleRun sample(const SampleConfig& cfg, const Kernel& kernel);
SampleRun sample(const SampleConfig& cfg, const CantorSet& set);

struct LinearStatisticEstimate {
  std::vector<double> values;  // S_f per sample
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double mean_stderr = 0.0;
  double variance_stderr = 0.0;  // jackknife
};

LinearStatisticEstimate estimate_linear_statistic(std::span<const PointSample> samples,
                                                  const std::function<double(double)>& f);
LinearStatisticEstimate estimate_linear_statistic(std::span<const PointSample> samples, const TestFunction& tf);
// number of points in [a, b]
LinearStatisticEstimate estimate_count(std::span<const PointSample> samples, double a, double b);

}  // namespace cantor_dpp

#endif  // CANTOR_DPP_SAMPLER_HPP
