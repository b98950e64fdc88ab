#include "cantor_dpp/sampler.hpp"

#include "cantor_dpp/errors.hpp"
#include "cantor_dpp/philox.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>

namespace cantor_dpp {

void SampleConfig::validate() const {
  if (!(window > 0.0) || !std::isfinite(window)) throw DomainError("sample window must be positive");
  if (nodes < 16) throw DomainError("sampler needs at least 16 nodes");
  if (replicates < 1) throw DomainError("sampler needs at least one replicate");
}

int worker_threads(int requested) {
  int n = requested;
  if (n <= 0) {
    n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("CANTOR_DPP_THREADS")) {
      const int cap = std::atoi(env);
      if (cap > 0) n = std::min(n, cap);
    }
  }
  return std::max(1, n);
}

namespace {

// Sequential sampling from the projection onto span(V): pick a row with
// probability |V_i|^2 / k, project that coordinate out and re-orthonormalize.
std::vector<Eigen::Index> sample_projection(Eigen::MatrixXcd V, PhiloxStream& rng) {
  std::vector<Eigen::Index> picked;
  const Eigen::Index n = V.rows();
  while (V.cols() > 0) {
    const Eigen::VectorXd mass = V.rowwise().squaredNorm();
    const double total = mass.sum();
    const double u = rng.uniform() * total;
    Eigen::Index i = 0;
    double acc = mass(0);
    while (acc <= u && i + 1 < n) acc += mass(++i);
    picked.push_back(i);

    const Eigen::Index k = V.cols();
    if (k == 1) break;
    Eigen::Index j = 0;
    V.row(i).cwiseAbs().maxCoeff(&j);
    const std::complex<double> pivot = V(i, j);
    for (Eigen::Index c = 0; c < k; ++c) {
      if (c != j) V.col(c) -= V.col(j) * (V(i, c) / pivot);
    }
    V.col(j) = V.col(k - 1);
    V.conservativeResize(Eigen::NoChange, k - 1);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(V);
    V = qr.householderQ() * Eigen::MatrixXcd::Identity(n, k - 1);
  }
  return picked;
}

}  // namespace

SampleRun sample(const SampleConfig& cfg, const Kernel& kernel) {
  cfg.validate();
  const GramMatrix g = gram(kernel, cfg.window, cfg.nodes, cfg.rule, true);

  SampleRun run;
  run.window = cfg.window;
  run.eps_proj = g.eps_proj;
  run.expected_count = g.entries.diagonal().real().sum();
  if (!(g.eps_proj < kMaxProjectionDefect)) {
    throw PreconditionError("Gram projection defect " + std::to_string(g.eps_proj) +
                            " is too large for sampling; increase the node count");
  }

  const Eigen::Index n = g.nodes.size();
  Eigen::VectorXd lambda = g.eigenvalues;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    const double excursion = std::max(-lambda(k), lambda(k) - 1.0);
    if (excursion > 0.0) {
      ++run.clamp_events;
      if (excursion > kClampWarning) run.clamp_warning = true;
      lambda(k) = std::clamp(lambda(k), 0.0, 1.0);
    }
  }

  // quadrature cells: consecutive slices of [-W, W] whose widths are the weights
  Eigen::VectorXd cell_left(n);
  double edge = -cfg.window;
  for (Eigen::Index i = 0; i < n; ++i) {
    cell_left(i) = edge;
    edge += g.weights(i);
  }

  run.samples.resize(cfg.replicates);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int rep = next++; rep < cfg.replicates; rep = next++) {
      PhiloxStream rng(cfg.seed, static_cast<std::uint64_t>(rep));
      std::vector<Eigen::Index> keep;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (rng.uniform() < lambda(k)) keep.push_back(k);
      }
      Eigen::MatrixXcd V(n, static_cast<Eigen::Index>(keep.size()));
      for (std::size_t c = 0; c < keep.size(); ++c) V.col(static_cast<Eigen::Index>(c)) = g.eigenvectors.col(keep[c]);

      PointSample s;
      s.seed_used = cfg.seed;
      s.replicate = rep;
      s.selected = static_cast<int>(keep.size());
      s.eigen_clamp_events = run.clamp_events;
      for (Eigen::Index i : sample_projection(std::move(V), rng)) {
        double x = cell_left(i) + g.weights(i) * rng.open_uniform();
        s.points.push_back(std::clamp(x, -cfg.window, cfg.window));
      }
      std::sort(s.points.begin(), s.points.end());
      run.samples[rep] = std::move(s);
    }
  };
  const int threads = std::min(worker_threads(cfg.threads), cfg.replicates);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return run;
}

SampleRun sample(const SampleConfig& cfg, const CantorSet& set) {
  const Kernel kernel(std::make_shared<const CantorSet>(set), cfg.which);
  return sample(cfg, kernel);
}

LinearStatisticEstimate estimate_linear_statistic(std::span<const PointSample> samples,
                                                  const std::function<double(double)>& f) {
  if (samples.empty()) throw DomainError("linear statistic needs at least one sample");
  LinearStatisticEstimate e;
  e.values.reserve(samples.size());
  for (const auto& s : samples) {
    CompensatedSum<double> sum;
    for (double x : s.points) sum += f(x);
    e.values.push_back(sum.value());
  }
  const double n = static_cast<double>(e.values.size());
  CompensatedSum<double> s1;
  for (double v : e.values) s1 += v;
  e.mean = s1.value() / n;
  CompensatedSum<double> s2;
  for (double v : e.values) s2 += (v - e.mean) * (v - e.mean);
  const double ss = s2.value();
  e.variance = n > 1 ? ss / (n - 1) : 0.0;
  e.mean_stderr = n > 1 ? std::sqrt(e.variance / n) : 0.0;
  if (n > 2) {
    // leave-one-out variances from the centred sum of squares
    CompensatedSum<double> jk_mean;
    std::vector<double> loo(e.values.size());
    for (std::size_t i = 0; i < e.values.size(); ++i) {
      const double d = e.values[i] - e.mean;
      loo[i] = (ss - n / (n - 1) * d * d) / (n - 2);
      jk_mean += loo[i];
    }
    const double m = jk_mean.value() / n;
    CompensatedSum<double> spread;
    for (double v : loo) spread += (v - m) * (v - m);
    e.variance_stderr = std::sqrt((n - 1) / n * spread.value());
  }
  return e;
}

LinearStatisticEstimate estimate_linear_statistic(std::span<const PointSample> samples, const TestFunction& tf) {
  return estimate_linear_statistic(samples, [&tf](double x) { return tf(x); });
}

LinearStatisticEstimate estimate_count(std::span<const PointSample> samples, double a, double b) {
  return estimate_linear_statistic(samples, [a, b](double x) { return x >= a && x <= b ? 1.0 : 0.0; });
}

}  // namespace cantor_dpp
