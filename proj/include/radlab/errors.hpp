#pragma once

#include <stdexcept>
#include <string>

namespace radlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition (growth condition, sandwich, domination) fails.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate)
      : Error(what + " (achieved error estimate " + std::to_string(estimate) + ")"),
        error_estimate(estimate) {}
  double error_estimate;
};

/// A root finder or integrator stopped before its tolerance was met.
class ToleranceError : public Error {
 public:
  ToleranceError(const std::string& what, double residual)
      : Error(what + " (achieved residual " + std::to_string(residual) + ")"),
        residual(residual) {}
  double residual;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  OverflowError(const std::string& what, double where)
      : Error(what + " at r=" + std::to_string(where)), radius(where) {}
  double radius;
};

/// Numeric tail slope too close to the critical value to decide convergence.
class InconclusiveClassification : public Error {
 public:
  InconclusiveClassification(const std::string& what, double slope)
      : Error(what + " (tail slope " + std::to_string(slope) + ")"), slope(slope) {}
  double slope;
};

class NewtonDivergence : public Error {
 public:
  NewtonDivergence(std::size_t step, double residual)
      : Error("Newton iteration diverged at time step " + std::to_string(step) +
              " (residual " + std::to_string(residual) + ")"),
        step(step),
        residual(residual) {}
  std::size_t step;
  double residual;
};

class MonotonicityViolation : public Error {
 public:
  MonotonicityViolation(const std::string& report, double margin)
      : Error("monotonicity violation: " + report), margin(margin) {}
  double margin;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class InsufficientRange : public Error {
 public:
  using Error::Error;
};

}  // namespace radlab
