#pragma once

#include <stdexcept>
#include <string>

namespace psc {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operand shapes are incompatible (dimension mismatch, non-square input).
struct ShapeError : Error {
  using Error::Error;
};

// An input violates a documented validity requirement (non-CPTP Kraus set,
// non-unit trace, malformed gamma table, ...).
struct ValidationError : Error {
  using Error::Error;
};

// The request is outside the supported desk-scale parameter range.
struct CapabilityError : Error {
  using Error::Error;
};

// A documented precondition of an analysis was violated by the caller.
struct PreconditionError : Error {
  using Error::Error;
};

// A model builder met a transformation it cannot represent.
struct UnsupportedTransformationError : Error {
  using Error::Error;
};

}  // namespace psc
