#pragma once

#include <stdexcept>
#include <string>

namespace qsvm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A count or size argument is out of its allowed range.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A qubit or element index is out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A value lies outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The input makes a quantity undefined (zero variance, zero-norm kernel, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver failed to converge or produced non-finite values.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Computed values violate an invariant that should hold by construction.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Patch filtering left nothing to sample from.
class SelectionError : public Error {
 public:
  using Error::Error;
};

/// Not enough pixels of a class to draw the requested split.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsvm
