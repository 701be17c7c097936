#pragma once

#include <stdexcept>
#include <string>

namespace sqeval {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input data (audio, CSV, JSON).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid campaign / processing configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A clip whose level cannot be measured because nothing in it is active.
class NoActiveSpeechError : public InputError {
 public:
  using InputError::InputError;
};

/// Regression design matrix is rank deficient.
class SingularFitError : public Error {
 public:
  using Error::Error;
};

}  // namespace sqeval
