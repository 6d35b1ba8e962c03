#pragma once

#include <stdexcept>
#include <string>

namespace katz {

/// Base class for recoverable failures reported by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live over different rings or truncation orders.
class MismatchError : public Error {
 public:
  using Error::Error;
};

/// A linear system over Z/p^e has no solution.
class UnsolvableSystemError : public Error {
 public:
  using Error::Error;
};

/// Malformed q-expansion input or other user-supplied data.
class InputFormatError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint file is unreadable, has the wrong schema, or belongs to another run.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace katz
