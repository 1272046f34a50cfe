#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace narrative {

/// Base for every error the toolkit raises. Callers that only care about
/// "something in the pipeline failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input record. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Two records claim the same identity.
class ConflictError : public Error {
 public:
  using Error::Error;
};

/// A value falls outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller supplied inconsistent or empty input.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Not enough data points to build the requested result.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A statistic is undefined for the given input (e.g. zero variance).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

}  // namespace narrative
