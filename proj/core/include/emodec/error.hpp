#pragma once

#include <stdexcept>
#include <string>

namespace emodec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input was readable but its encoding or container is not supported.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Structured input (CSV, model file, trace) violates its schema.
/// `row()` is the 1-based line number in the source file, 0 when not applicable.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what, int row = 0);
  int row() const noexcept { return row_; }

 private:
  int row_;
};

/// A regression could not be fitted (too few rows, rank deficiency, zero variance).
class FitError : public Error {
 public:
  using Error::Error;
};

/// Caller passed arguments that violate an operation precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace emodec
