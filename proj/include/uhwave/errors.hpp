#pragma once

#include <stdexcept>
#include <string>

namespace uhwave {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument to a constructor or operation (bad dimension, |theta| >= 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Scenario or field is missing a required part, or carries an unknown key.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// A quadrature produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// A frequency point does not lie on the mass shell.
class OffShellError : public Error {
 public:
  using Error::Error;
};

}  // namespace uhwave
