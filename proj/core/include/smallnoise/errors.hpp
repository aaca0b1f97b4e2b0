#pragma once

#include <stdexcept>
#include <string>

namespace smallnoise {

/// Bad arguments or configuration supplied by the caller.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function (e.g. G outside (0, x*)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A solver or simulation produced a non-finite value or could not make progress.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double t, double x)
      : std::runtime_error(what), t_(t), x_(x) {}

  double time() const noexcept { return t_; }
  double state() const noexcept { return x_; }

 private:
  double t_;
  double x_;
};

/// Requested value cannot be resolved in double precision.
class PrecisionError : public std::range_error {
 public:
  using std::range_error::range_error;
};

}  // namespace smallnoise
