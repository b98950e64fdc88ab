#ifndef CANTOR_DPP_FOURIER_HPP
#define CANTOR_DPP_FOURIER_HPP

#include "cantor_dpp/cantor.hpp"
#include "cantor_dpp/errors.hpp"
#include "cantor_dpp/numeric.hpp"

#include <complex>
#include <concepts>
#include <span>

namespace cantor_dpp {

// Transform of the indicator of an interval of the given length centred at
// `centre`: e^{-2 pi i centre xi} * length * sin(pi length xi) / (pi length xi).
// Equal to (e^{-2 pi i a xi} - e^{-2 pi i b xi}) / (2 pi i xi) for the interval
// (centre - length/2, centre + length/2), and to `length` at xi = 0.
template <std::floating_point Real>
std::complex<Real> transform_centred(Real centre, Real length, Real xi) {
  return unit_phase(centre * xi) * (length * sinc_pi(length * xi));
}

// Integral of e^{-2 pi i x xi} over (a, b).
template <std::floating_point Real>
std::complex<Real> transform_interval(Real a, Real b, Real xi) {
  if (!(a < b)) throw DomainError("transform_interval requires a < b");
  return transform_centred(Real(0.5) * (a + b), b - a, xi);
}

struct FourierValue {
  std::complex<double> value;
  double tail_radius = 0.0;  // bound on |truncation error| from levels past N
  double xi = 0.0;
};

enum class LevelSum {
  automatic,   // enumerate materialized levels, factorize the rest
  enumerate,   // requires every level to be materialized
  factorized,  // closed-form product for every level
};

// Contribution of the 2^{n-1} removed intervals of level n.
std::complex<double> level_transform(const CantorSet& set, int n, double xi, LevelSum method = LevelSum::automatic);

// Bound on |sum over levels n > N| from the log-space lengths.
double tail_radius(const CantorSet& set, double xi);

FourierValue transform_I(const CantorSet& set, double xi, LevelSum method = LevelSum::automatic);
FourierValue transform_C(const CantorSet& set, double xi, LevelSum method = LevelSum::automatic);

// Adaptive Gauss-Kronrod integration of e^{-2 pi i x xi} over each interval,
// with the tolerance split in proportion to interval length. Used as an
// independent cross-check of the closed forms. Throws AccuracyError when the
// panel budget is exhausted.
std::complex<double> quadrature_oracle(std::span<const Interval> intervals, double xi, double tol,
                                       int max_panels_per_interval = 20000);

}  // namespace cantor_dpp

#endif  // CANTOR_DPP_FOURIER_HPP
