#pragma once

#include <stdexcept>
#include <string>

namespace gammasum {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Invalid user configuration (radius, tolerances, node counts).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Input record failed schema validation.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Estimated cancellation makes the result untrustworthy.
class PrecisionError : public Error {
  public:
    using Error::Error;
};

/// Matrix is not (numerically) positive definite.
class DefinitenessError : public Error {
  public:
    using Error::Error;
};

/// Continuous log-determinant could not be followed between two nodes.
class BranchError : public Error {
  public:
    using Error::Error;
};

/// The multivariate normalization self-test failed.
class NormalizationError : public Error {
  public:
    using Error::Error;
};

/// An iteration hit its cap. Carries the last available estimate.
class NonConvergence : public Error {
  public:
    NonConvergence(const std::string& what, double last_estimate, double err_estimate)
        : Error(what), last_estimate_(last_estimate), err_estimate_(err_estimate)
    {
    }

    double last_estimate() const noexcept { return last_estimate_; }
    double err_estimate() const noexcept { return err_estimate_; }

  private:
    double last_estimate_;
    double err_estimate_;
};

}  // namespace gammasum
