#pragma once

#include <stdexcept>
#include <string>

namespace kgreedy {

/// Bad shapes, non-positive shape parameters, malformed inputs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The kernel/functional combination has no representer in the native dual space
/// (e.g. a Radon line under an unweighted kernel).
class UnsupportedPairing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of its subdivision budget.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double value, double error_estimate)
      : std::runtime_error(what), value_(value), error_estimate_(error_estimate) {}

  double value() const noexcept { return value_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double value_;
  double error_estimate_;
};

/// A functional is (numerically) in the span of the already selected ones.
class NearDependence : public std::runtime_error {
 public:
  NearDependence(const std::string& what, std::string functional, double power_squared)
      : std::runtime_error(what), functional_(std::move(functional)), power_squared_(power_squared) {}

  const std::string& functional() const noexcept { return functional_; }
  double power_squared() const noexcept { return power_squared_; }

 private:
  std::string functional_;
  double power_squared_;
};

}  // namespace kgreedy
