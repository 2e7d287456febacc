#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctrlgad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file content; carries the 1-based line number.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, std::size_t line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Input violates a structural contract (id range, shape mismatch, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Invalid or inconsistent configuration values.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// An operation was called on inputs that do not satisfy its contract.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Iterative method failed to converge, or a result went non-finite.
class NumericError : public Error {
public:
  using Error::Error;
};

/// System matrix is not stable enough for the requested solve.
class StabilityError : public Error {
public:
  using Error::Error;
};

/// Filesystem failures (missing file, unwritable directory, ...).
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace ctrlgad
