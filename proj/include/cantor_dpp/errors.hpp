#ifndef CANTOR_DPP_ERRORS_HPP
#define CANTOR_DPP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cantor_dpp {

// Input outside the mathematical domain of an operation (bad ratio, a >= b, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A length sequence whose retained mass 1 - sum 2^{k-1} l_k reaches zero.
class InfeasibleLengthsError : public DomainError {
 public:
  InfeasibleLengthsError(const std::string& what, int level)
      : DomainError(what), level_(level) {}
  int level() const noexcept { return level_; }

 private:
  int level_;
};

class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested tolerance could not be met; carries the best estimate reached.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double best_estimate, double error_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}
  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cantor_dpp

#endif  // CANTOR_DPP_ERRORS_HPP
