#pragma once

#include <stdexcept>
#include <string>

namespace cnls {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (wrong representation,
/// mismatched grids, too few records, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The time step is too coarse for the nonlinear phase rotation.
class StepBoundViolation : public Error {
 public:
  StepBoundViolation(double max_modulus, double dt);
  double max_modulus() const { return max_modulus_; }
  double dt() const { return dt_; }

 private:
  double max_modulus_;
  double dt_;
};

/// The evolved field stopped being representable: non-finite samples or
/// runaway amplitude growth.
class NumericalBlowUp : public Error {
 public:
  NumericalBlowUp(const std::string& reason, double last_valid_time);
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

/// Malformed scenario text or an unknown check identifier.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace cnls
