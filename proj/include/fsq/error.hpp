#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>

namespace fsq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input document. `location` names the offending
/// field or cell, e.g. `tuples[2].memberships.Age.YA` or `line 4, column Age.YA`.
class ValidationError : public Error {
  public:
    ValidationError(std::string location, const std::string& message)
        : Error(location.empty() ? message : location + ": " + message),
          location_(std::move(location)),
          message_(message)
    {}

    const std::string& location() const noexcept { return location_; }
    const std::string& message() const noexcept { return message_; }

  private:
    std::string location_;
    std::string message_;
};

/// Reference to an object id, label, attribute or concept that does not exist.
class LookupError : public Error {
  public:
    using Error::Error;
};

/// An operation was called outside its precondition.
class PreconditionError : public Error {
  public:
    using Error::Error;
};

/// Query text that does not parse, or that does not fit the vocabulary.
class QueryError : public Error {
  public:
    QueryError(const std::string& message, std::size_t line, std::size_t column,
               std::set<std::string> expected = {})
        : Error(message), line_(line), column_(column), expected_(std::move(expected))
    {}

    /// 1-based; 0 when the error is not tied to a position (semantic errors).
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::set<std::string>& expected() const noexcept { return expected_; }

  private:
    std::size_t line_;
    std::size_t column_;
    std::set<std::string> expected_;
};

}  // namespace fsq
