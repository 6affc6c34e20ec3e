#pragma once

#include <stdexcept>
#include <string>

namespace growepi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, configuration or precondition violation.
/// The CLI maps this to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A count would have gone negative or overflowed.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Root bracketing failed in a numerical solver.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// The ODE step-size self check failed.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// Two sample grids that must coincide do not.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// Fewer surviving replicates than an estimator needs.
class InsufficientSurvivorsError : public Error {
 public:
  using Error::Error;
};

/// A growth-rate fit window contains an extinct sample.
class ExtinctWindowError : public Error {
 public:
  using Error::Error;
};

}  // namespace growepi
