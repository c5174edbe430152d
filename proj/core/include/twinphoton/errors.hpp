#pragma once

#include <stdexcept>
#include <string>

namespace twinphoton {

/// Input violates a documented precondition or domain invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dispersion data cannot support the requested phase-matching condition.
class InvalidDispersion : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Tomography settings do not form an informationally complete set.
class InvalidSettings : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A root could not be bracketed inside the dispersion window.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem or parse failure on external data.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twinphoton
