#pragma once

#include <stdexcept>
#include <string>

namespace nakasum {

// Root of every error raised by the library. The CLI maps the concrete
// subclasses to exit codes: validation 2, numerical accuracy 3, I/O 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Series or integral known to diverge for the given arguments.
class DivergenceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SingularityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// An infinite series hit its term cap before meeting the tolerance.
class TruncationError : public NumericalError {
 public:
  TruncationError(const std::string& what, double partial)
      : NumericalError(what), partial_(partial) {}
  double partial() const noexcept { return partial_; }

 private:
  double partial_;
};

// A quadrature failed to reach its tolerance. Carries the last estimate and
// the competing estimate it was compared against.
class AccuracyError : public NumericalError {
 public:
  AccuracyError(const std::string& what, double estimate, double other)
      : NumericalError(what), estimate_(estimate), other_(other) {}
  double estimate() const noexcept { return estimate_; }
  double other() const noexcept { return other_; }

 private:
  double estimate_;
  double other_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nakasum
