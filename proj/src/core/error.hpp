#pragma once

#include <stdexcept>
#include <string>

namespace cadaft {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor shape mismatch; the message names the offending shapes.
struct ShapeError : Error {
  using Error::Error;
};

// Math domain violation (log of a non-positive value, empty token pair, ...).
struct DomainError : Error {
  using Error::Error;
};

// A documented precondition was violated by the caller.
struct ContractViolation : Error {
  using Error::Error;
};

// Invalid configuration value or combination; message names the field.
struct ConfigError : Error {
  using Error::Error;
};

// File and format problems.
struct IoError : Error {
  using Error::Error;
};

}  // namespace cadaft
