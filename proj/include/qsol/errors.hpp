#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qsol {

/// Input outside the domain of a function (non-finite values, negative
/// arguments where only t >= 0 is defined).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A construction parameter violates a documented constraint.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method failed. Carries an optional snapshot of the iterate
/// at the moment of failure.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, std::vector<double> state = {})
      : std::runtime_error(what), state_(std::move(state)) {}

  const std::vector<double>& state() const noexcept { return state_; }

 private:
  std::vector<double> state_;
};

}  // namespace qsol
