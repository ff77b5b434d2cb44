#pragma once

#include <stdexcept>
#include <string>

namespace pwcert {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad cutoff, mismatched bases, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The N_el-th and (N_el+1)-st eigenvalues are too close to apply the Aufbau principle.
class DegenerateFermiLevel : public Error {
 public:
  using Error::Error;
};

/// An operator expected to be positive definite is not.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// An estimator cannot be evaluated (nonpositive relative gap, q >= 1, ...).
class EstimatorUnavailable : public Error {
 public:
  using Error::Error;
};

/// Internal consistency check failed (negative error component, leaking residual, ...).
class InconsistentState : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class MissingReference : public Error {
 public:
  using Error::Error;
};

}  // namespace pwcert
