#pragma once

#include <stdexcept>
#include <string>

namespace wbary {

/// Base class for all numerical errors raised by this library.  Input
/// validation problems (bad dimensions excepted) use std::invalid_argument
/// instead, so callers can distinguish "bad request" from "math went wrong".
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix required to be positive semidefinite has an eigenvalue below
/// the negative clamp threshold.
class NotPsdError : public Error {
 public:
  explicit NotPsdError(const std::string& what) : Error(what) {}
};

/// A matrix required to be strictly positive definite is singular (or close
/// enough to singular that inverse square roots would be meaningless).
class SingularMatrixError : public Error {
 public:
  explicit SingularMatrixError(const std::string& what) : Error(what) {}
};

/// Two operands have incompatible dimensions.
class DimMismatchError : public Error {
 public:
  explicit DimMismatchError(const std::string& what) : Error(what) {}
};

/// The closed-form barycenter was requested for covariances that do not
/// commute pairwise.
class NotCommutingError : public Error {
 public:
  explicit NotCommutingError(const std::string& what) : Error(what) {}
};

/// An exhaustive-search routine was asked for more work than its hard cap.
class TooLargeError : public Error {
 public:
  explicit TooLargeError(const std::string& what) : Error(what) {}
};

/// The eigenvalue iteration did not reach its off-diagonal target within the
/// sweep budget.  Should not happen for finite symmetric input.
class EigenConvergenceError : public Error {
 public:
  explicit EigenConvergenceError(const std::string& what) : Error(what) {}
};

/// A probability or quantile level lies outside the open unit interval.
class OutOfRangeError : public Error {
 public:
  explicit OutOfRangeError(const std::string& what) : Error(what) {}
};

}  // namespace wbary
