#pragma once

#include <stdexcept>
#include <string>

namespace vsc {

/// Base of every error raised by the library. Each subclass names one failure
/// category so callers can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix/vector shape mismatch, empty operand, or non-finite entry.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A factorization met a non-positive pivot.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Pair sampling needs at least one sample of each label.
class ClassMissingError : public Error {
 public:
  using Error::Error;
};

/// Coincident pair endpoints (or too many of them in a row while sampling).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Bad argument value (fold count, neighbour count, list lengths, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. Carries the 1-based line (and column when known).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line,
                            std::size_t column) {
    std::string msg = "line " + std::to_string(line);
    if (column != 0) msg += ", column " + std::to_string(column);
    return msg + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

/// Input declares something the classifier cannot consume (nominal inputs).
class UnsupportedFeatureError : public Error {
 public:
  using Error::Error;
};

}  // namespace vsc
