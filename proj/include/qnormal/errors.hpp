#pragma once

#include <stdexcept>
#include <string>

namespace qnormal {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes, so keep the hierarchy flat and descriptive.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad caller input: parameters outside their domain.
class ParamOutOfRange : public Error {
 public:
  using Error::Error;
};

class OutOfSupport : public ParamOutOfRange {
 public:
  using ParamOutOfRange::ParamOutOfRange;
};

class BadIndexSet : public ParamOutOfRange {
 public:
  using ParamOutOfRange::ParamOutOfRange;
};

class NonCenteredFunction : public ParamOutOfRange {
 public:
  using ParamOutOfRange::ParamOutOfRange;
};

class Q1Unsupported : public ParamOutOfRange {
 public:
  using ParamOutOfRange::ParamOutOfRange;
};

class InfiniteProductAtQ1 : public ParamOutOfRange {
 public:
  using ParamOutOfRange::ParamOutOfRange;
};

// Numerical failures: the computation was well posed but could not be
// carried to the requested accuracy.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SlowConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateDenominator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IllConditioned : public NumericalError {
 public:
  IllConditioned(const std::string& what, double condition)
      : NumericalError(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class SingularSystem : public NumericalError {
 public:
  SingularSystem(const std::string& what, double condition)
      : NumericalError(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class ToleranceNotMet : public NumericalError {
 public:
  ToleranceNotMet(const std::string& what, double best_value, double error_estimate)
      : NumericalError(what), best_value_(best_value), error_estimate_(error_estimate) {}
  double best_value() const noexcept { return best_value_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_value_;
  double error_estimate_;
};

class TooManyRejections : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qnormal
