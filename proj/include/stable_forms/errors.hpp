#pragma once

#include <stdexcept>
#include <string>

namespace stable_forms {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on spaces of different dimension.
class DimError : public Error {
 public:
  using Error::Error;
};

/// Form degree is out of range for the requested operation.
class DegreeError : public Error {
 public:
  using Error::Error;
};

/// Metric is singular, not symmetric, or has the wrong signature.
class MetricError : public Error {
 public:
  using Error::Error;
};

/// A 3-form is outside the open orbit an operation needs.
class OrbitError : public Error {
 public:
  using Error::Error;
};

/// A supplied structure (e.g. a complex structure) fails its defining identity.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input (form files, CLI arguments).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace stable_forms
