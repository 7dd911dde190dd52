#pragma once

#include <stdexcept>
#include <string>

namespace reglab {

// Base of every error the library raises. `kind()` is a stable short tag used
// by the command-line tool for its machine-readable diagnostics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

// Operands that do not live on the same sample space, wrong vector lengths, ...
class StructuralError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "structural"; }
};

// Malformed user input: files, labels, parameters.
class InputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "input"; }
};

// A documented precondition of an operation was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

// The instance exceeds what an exhaustive routine is allowed to enumerate.
class CapacityError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "capacity"; }
};

}  // namespace reglab
