#pragma once

#include <stdexcept>
#include <string>

namespace momc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched grids, variable counts or sample-set sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A reconstruction requested more ghost layers than the mesh provides.
class StencilError : public Error {
 public:
  using Error::Error;
};

/// Nonpositive depth or cross-sectional area, or a nonfinite value.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// Operation not defined for the given model or configuration.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument outside the cases above (degenerate widths, bad counts).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A time march produced nonfinite values or exceeded its step budget.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, long step) : Error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// A banded linear system could not be factorized.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Persisted reference was produced by a different model/grid/seed.
class StaleReferenceError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace momc
