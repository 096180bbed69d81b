#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace elr {

// Base of every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent shapes or malformed in-memory inputs.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid argument values (out-of-range ids, bad configuration).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Non-finite values encountered during a numerical computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Rejected file contents. Carries the file and (1-based) line, 0 if unknown.
class FormatError : public Error {
 public:
  FormatError(std::string file, std::size_t line, const std::string& what)
      : Error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) +
              ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace elr
