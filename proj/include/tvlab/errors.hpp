#pragma once

#include <stdexcept>
#include <string>

namespace tvlab {

/// Argument outside the mathematical domain of an operation
/// (divergent integral, invalid Hurst pair, empty pool, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature could not reach the requested tolerance.
class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hard numerical failure: eigensolver non-convergence, covariance
/// not positive semidefinite after the jitter ladder, ...
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few sample hits below the smallest small-ball level.
class InsufficientTailHits : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tvlab
