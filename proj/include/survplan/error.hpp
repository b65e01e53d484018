#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace survplan {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model data: bad runs, missing states, non-positive weights.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Syntax errors in formulas and scenario files. `position()` is a byte
/// offset for formulas and a 1-based line number for scenario files.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// An operation was called outside its precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A property guaranteed by construction did not hold. Indicates a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace survplan
