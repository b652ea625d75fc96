#pragma once

#include <stdexcept>
#include <string>

namespace tshsr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not fit an operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition of an operation was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values (counts, hyperparameters, flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Invalid model input such as an out-of-vocabulary token id.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Dataset or checkpoint files that cannot be read back.
class LoadError : public Error {
 public:
  using Error::Error;
};

}  // namespace tshsr
