#include "cantor_dpp/cantor.hpp"

#include "cantor_dpp/errors.hpp"
#include "cantor_dpp/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace cantor_dpp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// 4^{n/delta}
double growth_exponent(int n, double delta) { return std::exp2(2.0 * n / delta); }

// exponent * log2(u) with the convention 0 * inf = 0 (u = 1 stays 1).
double scaled_log(double exponent, double log2_u) {
  if (log2_u == 0.0) return 0.0;
  return exponent * log2_u;
}

std::string describe_ratio(std::size_t index, double value) {
  std::ostringstream os;
  os.precision(17);
  os << "ratio alpha_" << index + 1 << " = " << value << " lies outside (0, 1)";
  return os.str();
}

double ratio_at(std::span<const double> ratios, int n) {
  const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(n - 1), ratios.size() - 1);
  return ratios[idx];
}

double theta_log2(double theta) { return theta > 0.0 ? std::log2(theta) : kNegInf; }

}  // namespace

std::string_view to_string(SpecMode mode) {
  switch (mode) {
    case SpecMode::ratios: return "ratios";
    case SpecMode::lengths: return "lengths";
    case SpecMode::theorem2: return "theorem2";
  }
  return "ratios";
}

SpecMode spec_mode_from_string(std::string_view name) {
  if (name == "ratios") return SpecMode::ratios;
  if (name == "lengths") return SpecMode::lengths;
  if (name == "theorem2") return SpecMode::theorem2;
  throw DomainError("unknown spec mode '" + std::string(name) + "'");
}

USequence USequence::geometric() {
  USequence u;
  u.id = "geometric";
  u.log2_term = [](int n) { return -static_cast<double>(n); };
  // Consecutive series terms shrink by at least 2^{1-4^{(k+1)/delta}} <= 1/2,
  // so the tail is at most twice its first term.
  u.log2_tail_bound = [](int n, double delta) {
    const int k = n + 1;
    return 1.0 + (k - 1) + scaled_log(growth_exponent(k, delta), -static_cast<double>(k));
  };
  return u;
}

USequence USequence::quadratic() {
  USequence u;
  u.id = "quadratic";
  u.log2_term = [](int n) { return -2.0 * std::log2(static_cast<double>(n)); };
  u.log2_tail_bound = [](int n, double delta) {
    const int k = n + 1;
    return 1.0 + (k - 1) + scaled_log(growth_exponent(k, delta), -2.0 * std::log2(static_cast<double>(k)));
  };
  return u;
}

USequence USequence::from_id(std::string_view id) {
  if (id == "geometric") return geometric();
  if (id == "quadratic") return quadratic();
  throw DomainError("unknown u-sequence '" + std::string(id) + "' (expected geometric|quadratic)");
}

CantorSpec CantorSpec::from_ratios(std::vector<double> ratios, std::optional<int> max_level) {
  CantorSpec s;
  s.mode = SpecMode::ratios;
  s.ratios = std::move(ratios);
  s.max_level = max_level;
  return s;
}

CantorSpec CantorSpec::from_lengths(std::vector<double> lengths, std::optional<int> max_level) {
  CantorSpec s;
  s.mode = SpecMode::lengths;
  s.lengths = std::move(lengths);
  s.max_level = max_level;
  return s;
}

CantorSpec CantorSpec::theorem2(double theta, double delta, std::string u_seq, std::optional<int> max_level) {
  CantorSpec s;
  s.mode = SpecMode::theorem2;
  s.theta = theta;
  s.delta = delta;
  s.u_seq = std::move(u_seq);
  s.max_level = max_level;
  return s;
}

void CantorSpec::validate() const {
  if (max_level && *max_level < 0) throw DomainError("max_level must be non-negative");
  if (!(log2_floor <= 0.0 && log2_floor >= -1074.0)) throw DomainError("log2_floor must lie in [-1074, 0]");
  switch (mode) {
    case SpecMode::ratios:
      if (ratios.empty()) throw DomainError("ratios mode requires at least one ratio");
      for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!(ratios[i] > 0.0 && ratios[i] < 1.0)) throw DomainError(describe_ratio(i, ratios[i]));
      }
      break;
    case SpecMode::lengths: {
      if (lengths.empty()) throw DomainError("lengths mode requires at least one length");
      for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i])) {
          throw DomainError("length l_" + std::to_string(i + 1) + " must be positive and finite");
        }
      }
      const std::size_t n = std::min<std::size_t>(lengths.size(), max_level.value_or(kDefaultMaxLevel));
      (void)profile_from_lengths(std::span<const double>(lengths).first(n));
      break;
    }
    case SpecMode::theorem2:
      if (!(theta >= 0.0 && theta < 1.0)) throw DomainError("theta must lie in [0, 1)");
      if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
      (void)USequence::from_id(u_seq);
      break;
  }
}

double LengthProfile::length(int n) const { return exp2_or_zero(log2_length.at(n - 1)); }
double LengthProfile::retained(int n) const { return exp2_or_zero(log2_retained.at(n)); }

LengthProfile ratios_to_lengths(std::span<const double> ratios, int levels) {
  if (levels < 0) throw DomainError("level count must be non-negative");
  if (levels > 0 && ratios.empty()) throw DomainError("empty ratio sequence");
  LengthProfile p;
  p.log2_length.reserve(levels);
  p.log2_retained.reserve(levels + 1);
  p.log2_retained.push_back(0.0);
  CompensatedSum<double> log2_r;
  for (int n = 1; n <= levels; ++n) {
    const double a = ratio_at(ratios, n);
    if (!(a > 0.0 && a < 1.0)) {
      throw DomainError(describe_ratio(std::min<std::size_t>(n - 1, ratios.size() - 1), a));
    }
    p.log2_length.push_back(log2_r.value() + std::log2(a) - (n - 1));
    log2_r += std::log1p(-a) / std::numbers::ln2;
    p.log2_retained.push_back(log2_r.value());
  }
  return p;
}

LengthProfile profile_from_lengths(std::span<const double> lengths) {
  LengthProfile p;
  p.log2_retained.push_back(0.0);
  CompensatedSum<double> retained;
  retained += 1.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    const double l = lengths[i];
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw DomainError("length l_" + std::to_string(n) + " must be positive and finite");
    }
    retained += -std::ldexp(l, n - 1);
    const double r = retained.value();
    if (!(r > 0.0)) {
      throw InfeasibleLengthsError("infeasible lengths: 2^{n-1} l_n exceeds the remaining mass at level " +
                                       std::to_string(n),
                                   n);
    }
    p.log2_length.push_back(std::log2(l));
    p.log2_retained.push_back(std::log2(r));
  }
  return p;
}

std::vector<double> lengths_to_ratios(const LengthProfile& profile) {
  std::vector<double> alpha;
  alpha.reserve(profile.log2_length.size());
  for (int n = 1; n <= profile.levels(); ++n) {
    const double a = std::exp2((n - 1) + profile.log2_length[n - 1] - profile.log2_retained[n - 1]);
    if (!(a < 1.0) || profile.log2_retained.at(n) == kNegInf) {
      throw InfeasibleLengthsError("infeasible lengths: alpha_" + std::to_string(n) + " would be >= 1", n);
    }
    alpha.push_back(a);
  }
  return alpha;
}

std::vector<double> lengths_to_ratios(std::span<const double> lengths) {
  return lengths_to_ratios(profile_from_lengths(lengths));
}

double ThetaConstruction::log2_length(int n) const {
  return log2_Theta + scaled_log(growth_exponent(n, delta), u.log2_term(n));
}

double ThetaConstruction::log2_root_length(int n, double probe_delta) const {
  // l_n^{1/e'} = Theta^{1/e'} u_n^{e/e'} with e = 4^{n/delta}, e' = 4^{n/probe_delta}
  const double inv_probe = std::exp2(-2.0 * n / probe_delta);
  const double ratio = std::exp2(2.0 * n * (1.0 / delta - 1.0 / probe_delta));
  return log2_Theta * inv_probe + scaled_log(ratio, u.log2_term(n));
}

double ThetaConstruction::log2_mass_after(int n) const {
  const int computed = static_cast<int>(log2_series_terms.size());
  if (n >= computed) return log2_Theta + u.log2_tail_bound(n, delta);
  double s = log2_series_remainder;
  for (int k = computed; k > n; --k) s = log2_add(s, log2_series_terms[k - 1]);
  return log2_Theta + s;
}

ThetaConstruction construct_theorem2(double theta, double delta, const USequence& u) {
  if (!(theta >= 0.0 && theta < 1.0)) throw DomainError("theta must lie in [0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  ThetaConstruction c;
  c.theta = theta;
  c.delta = delta;
  c.u = u;

  // Sum 2^{n-1} u_n^{4^{n/delta}} in log space. Terms are kept until they are
  // far below the subnormal floor relative to the sum, so every level that can
  // be materialized has its own term; the rest is covered by the tail bound.
  constexpr double kRelativeCutoff = -1074.0 - 64.0;
  constexpr int kMaxTerms = 4096;
  double sum = kNegInf;
  for (int k = 1; k <= kMaxTerms; ++k) {
    const double t = (k - 1) + scaled_log(growth_exponent(k, delta), u.log2_term(k));
    c.log2_series_terms.push_back(t);
    sum = log2_add(sum, t);
    const double rem = u.log2_tail_bound(k, delta);
    if (k >= 2 && (t == kNegInf || t - sum < kRelativeCutoff) && rem - sum < -80.0) break;
  }
  c.log2_series = sum;
  c.log2_series_remainder = u.log2_tail_bound(static_cast<int>(c.log2_series_terms.size()), delta);
  if (!(c.log2_series_remainder - sum < -80.0)) {
    throw NumericError("theorem2 series remainder could not be certified below 2^-80 of the partial sum");
  }
  c.log2_Theta = std::log1p(-theta) / std::numbers::ln2 - sum;
  c.Theta = std::exp2(c.log2_Theta);
  return c;
}

CantorSet CantorSet::build(const CantorSpec& spec, const BuildOptions& options) {
  spec.validate();
  CantorSet set;
  set.spec_ = spec;
  LengthProfile& p = set.profile_;

  switch (spec.mode) {
    case SpecMode::ratios:
      p = ratios_to_lengths(spec.ratios, spec.max_level.value_or(CantorSpec::kDefaultMaxLevel));
      set.log2_tail_ = kNegInf;
      break;
    case SpecMode::lengths: {
      const std::size_t n =
          std::min<std::size_t>(spec.lengths.size(), spec.max_level.value_or(CantorSpec::kDefaultMaxLevel));
      p = profile_from_lengths(std::span<const double>(spec.lengths).first(n));
      set.log2_tail_ = kNegInf;
      break;
    }
    case SpecMode::theorem2: {
      const auto& c = set.construction_.emplace(construct_theorem2(spec.theta, spec.delta, USequence::from_id(spec.u_seq)));
      int levels = 0;
      while (levels < static_cast<int>(c.log2_series_terms.size()) && c.log2_length(levels + 1) >= spec.log2_floor) {
        ++levels;
      }
      if (spec.max_level) levels = std::min(levels, *spec.max_level);
      const double log2_theta = theta_log2(spec.theta);
      p.log2_retained.push_back(0.0);
      for (int n = 1; n <= levels; ++n) {
        p.log2_length.push_back(c.log2_length(n));
        p.log2_retained.push_back(log2_add(log2_theta, c.log2_mass_after(n)));
      }
      set.log2_tail_ = c.log2_mass_after(levels);
      break;
    }
  }

  // Levels under the floor are moved into the tail (ratios/lengths modes).
  int kept = 0;
  while (kept < p.levels() && p.log2_length[kept] >= spec.log2_floor) ++kept;
  for (int n = p.levels(); n > kept; --n) {
    set.log2_tail_ = log2_add(set.log2_tail_, (n - 1) + p.log2_length[n - 1]);
  }
  p.log2_length.resize(kept);
  p.log2_retained.resize(kept + 1);

  const double log2_r = p.log2_retained.back();
  set.measure_C_ = exp2_or_zero(log2_sub(log2_r, set.log2_tail_));

  CompensatedSum<double> mass;
  for (int n = 1; n <= kept; ++n) mass += exp2_or_zero((n - 1) + p.log2_length[n - 1]);
  set.enumerated_mass_ = mass.value();

  // Endpoint recursion from [0, 1]: the removed interval of [a, b] is centred
  // at (a + b) / 2 and leaves children of length L_n = R_n / 2^n on each side.
  const int enumerate = std::min(kept, options.max_enumerated_level);
  std::vector<Interval> parents{{0.0, 1.0}};
  for (int n = 1; n <= enumerate; ++n) {
    const double child = set.child_length(n);
    std::vector<double> centres;
    std::vector<Interval> removed;
    std::vector<Interval> children;
    centres.reserve(parents.size());
    removed.reserve(parents.size());
    children.reserve(2 * parents.size());
    for (const auto& [a, b] : parents) {
      centres.push_back(0.5 * (a + b));
      removed.push_back({a + child, b - child});
      children.push_back({a, a + child});
      children.push_back({b - child, b});
    }
    set.centres_.push_back(std::move(centres));
    set.removed_.push_back(std::move(removed));
    parents = std::move(children);
  }
  return set;
}

double CantorSet::log2_length(int n) const { return profile_.log2_length.at(n - 1); }
double CantorSet::length(int n) const { return profile_.length(n); }
double CantorSet::log2_retained(int n) const { return profile_.log2_retained.at(n); }

double CantorSet::ratio(int n) const {
  return std::exp2((n - 1) + log2_length(n) - log2_retained(n - 1));
}

double CantorSet::child_length(int n) const { return exp2_or_zero(log2_retained(n) - n); }
double CantorSet::centre_spacing(int n) const { return child_length(n) + length(n); }

std::span<const double> CantorSet::centres(int n) const {
  if (!enumerated(n)) throw DomainError("level " + std::to_string(n) + " is not enumerated");
  return centres_[n - 1];
}

std::vector<Interval> CantorSet::intervals(int n) const {
  if (!enumerated(n)) throw DomainError("level " + std::to_string(n) + " is not enumerated");
  return removed_[n - 1];
}

std::vector<Interval> CantorSet::enumerated_intervals() const {
  std::vector<Interval> all;
  for (const auto& level : removed_) all.insert(all.end(), level.begin(), level.end());
  return all;
}

double CantorSet::endpoint_error_bound() const {
  return levels() * std::numeric_limits<double>::epsilon();
}

int CantorSet::analytic_levels() const {
  if (construction_) return std::max(levels(), 64);
  return levels();
}

double CantorSet::log2_length_analytic(int n) const {
  if (construction_) return construction_->log2_length(n);
  return log2_length(n);
}

double CantorSet::log2_root_length(int n, double delta) const {
  if (construction_) return construction_->log2_root_length(n, delta);
  return log2_length(n) / growth_exponent(n, delta);
}

double CantorSet::exp2_tail() const { return exp2_or_zero(log2_tail_); }

Measures measures(const CantorSet& set) {
  return {set.measure_C(), set.measure_I(), set.tail_measure()};
}

}  // namespace cantor_dpp
