#pragma once

#include <stdexcept>
#include <string>

namespace fiberline {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input (header, row, token).
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_ = 0;
};

/// Well-formed input that violates a data invariant.
class ValidationError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

/// A control polygon with no edge of positive length.
class InvalidPolygon : public Error {
  public:
    using Error::Error;
};

} // namespace fiberline
