#ifndef CANTOR_DPP_CANTOR_HPP
#define CANTOR_DPP_CANTOR_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cantor_dpp {

enum class SpecMode { ratios, lengths, theorem2 };

std::string_view to_string(SpecMode mode);
SpecMode spec_mode_from_string(std::string_view name);

// A positive summable sequence u_n together with a certified bound on the
// tail of sum_n 2^{n-1} u_n^{4^{n/delta}}.
struct USequence {
  std::string id;
  // log2(u_n), n >= 1
  std::function<double(int)> log2_term;
  // log2 of an upper bound on sum_{k>n} 2^{k-1} u_k^{4^{k/delta}}
  std::function<double(int n, double delta)> log2_tail_bound;

  static USequence geometric();  // u_n = 2^{-n}
  static USequence quadratic();  // u_n = n^{-2}
  static USequence from_id(std::string_view id);
};

struct CantorSpec {
  SpecMode mode = SpecMode::ratios;
  std::vector<double> ratios;   // ratios mode; repeated past its end
  std::vector<double> lengths;  // lengths mode
  double theta = 0.0;           // theorem2 mode
  double delta = 0.5;           // theorem2 mode
  std::string u_seq = "geometric";
  std::optional<int> max_level;
  double log2_floor = -1074.0;  // levels with log2(l_n) below this are not materialized

  static constexpr int kDefaultMaxLevel = 30;

  static CantorSpec from_ratios(std::vector<double> ratios, std::optional<int> max_level = {});
  static CantorSpec from_lengths(std::vector<double> lengths, std::optional<int> max_level = {});
  static CantorSpec theorem2(double theta, double delta, std::string u_seq = "geometric",
                             std::optional<int> max_level = {});

  // Throws DomainError / InfeasibleLengthsError when an invariant fails.
  void validate() const;
};

// Per-level lengths l_n together with the retained mass
// R_n = 1 - sum_{k<=n} 2^{k-1} l_k = prod_{k<=n} (1 - alpha_k), both in log2.
struct LengthProfile {
  std::vector<double> log2_length;    // entry n-1 holds log2(l_n)
  std::vector<double> log2_retained;  // entry n holds log2(R_n); R_0 = 1

  int levels() const { return static_cast<int>(log2_length.size()); }
  double length(int n) const;
  double retained(int n) const;
};

LengthProfile ratios_to_lengths(std::span<const double> ratios, int levels);
// Linear lengths; the retained mass is accumulated with compensated summation.
LengthProfile profile_from_lengths(std::span<const double> lengths);
std::vector<double> lengths_to_ratios(const LengthProfile& profile);
std::vector<double> lengths_to_ratios(std::span<const double> lengths);

struct ThetaConstruction {
  double theta = 0.0;
  double delta = 0.5;
  double log2_Theta = 0.0;
  double Theta = 0.0;
  USequence u;
  // log2 of sum_n 2^{n-1} u_n^{4^{n/delta}} and of the certified remainder left out
  double log2_series = 0.0;
  double log2_series_remainder = 0.0;
  // log2 of the individual series terms 2^{n-1} u_n^{4^{n/delta}}, n = 1..size
  std::vector<double> log2_series_terms;

  // log2(l_n) = log2(Theta) + 4^{n/delta} log2(u_n); valid for every n >= 1.
  double log2_length(int n) const;
  // log2(l_n^{1/4^{n/probe_delta}}) evaluated without forming l_n.
  double log2_root_length(int n, double probe_delta) const;
  // log2 of sum_{k>n} 2^{k-1} l_k, including the certified remainder.
  double log2_mass_after(int n) const;
};

ThetaConstruction construct_theorem2(double theta, double delta, const USequence& u);

struct Interval {
  double left;
  double right;
};

struct BuildOptions {
  // Levels deeper than this keep only their per-level data; interval lists are
  // not materialized (2^{n-1} entries per level).
  int max_enumerated_level = 20;
};

class CantorSet {
 public:
  static CantorSet build(const CantorSpec& spec, const BuildOptions& options = {});

  const CantorSpec& spec() const { return spec_; }
  int levels() const { return static_cast<int>(profile_.log2_length.size()); }

  double log2_length(int n) const;
  double length(int n) const;
  double log2_retained(int n) const;
  double ratio(int n) const;
  // Length of each of the 2^n closed intervals making up C_n.
  double child_length(int n) const;
  // Distance between the centres of the two children produced by split n.
  double centre_spacing(int n) const;

  bool enumerated(int n) const { return n >= 1 && n <= enumerated_levels(); }
  int enumerated_levels() const { return static_cast<int>(centres_.size()); }
  std::span<const double> centres(int n) const;
  std::vector<Interval> intervals(int n) const;
  std::vector<Interval> enumerated_intervals() const;

  double measure_C() const { return measure_C_; }
  double measure_I() const { return 1.0 - measure_C_; }
  double tail_measure() const { return exp2_tail(); }
  double log2_tail_measure() const { return log2_tail_; }
  // sum_{n<=N} 2^{n-1} l_n with compensated summation
  double enumerated_measure_I() const { return enumerated_mass_; }
  double endpoint_error_bound() const;

  const std::optional<ThetaConstruction>& theta_construction() const { return construction_; }

  // Levels for which log2(l_n) is known: N for ratios/lengths, beyond N for theorem2.
  int analytic_levels() const;
  double log2_length_analytic(int n) const;
  double log2_root_length(int n, double delta) const;

  const LengthProfile& profile() const { return profile_; }

 private:
  double exp2_tail() const;

  CantorSpec spec_;
  LengthProfile profile_;
  std::optional<ThetaConstruction> construction_;
  std::vector<std::vector<double>> centres_;
  std::vector<std::vector<Interval>> removed_;
  double measure_C_ = 1.0;
  double log2_tail_ = 0.0;
  double enumerated_mass_ = 0.0;
};

inline CantorSet build_set(const CantorSpec& spec, const BuildOptions& options = {}) {
  return CantorSet::build(spec, options);
}

struct Measures {
  double measure_C;
  double measure_I;
  double tail_measure;
};

Measures measures(const CantorSet& set);

}  // namespace cantor_dpp

#endif  // CANTOR_DPP_CANTOR_HPP
