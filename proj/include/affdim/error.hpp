#pragma once

#include <stdexcept>
#include <string>

namespace affdim {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto stable exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand has the wrong shape (non-square, mismatched dimensions).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A work budget (word enumeration, subset enumeration) would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition (e.g. non-contracting maps).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A statistical estimate could not be formed from the available data.
class EstimationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration file or command-line input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace affdim
