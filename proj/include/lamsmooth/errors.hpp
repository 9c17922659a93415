#pragma once

#include <stdexcept>
#include <string>

namespace lamsmooth {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter or a base point lies outside the declared domain, or a
// finite-difference stencil would leave it.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A point is not bracketed by the leaves of the family (projection or
// smoother lookup has nothing to hold on to).
class CoverageError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Leaves that should be strictly ordered are not.
class MonotonicityError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

// Step-size underflow or refinement failure. Carries the last x that was
// integrated successfully.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double last_x)
      : Error(what), last_x_(last_x) {}
  double last_x() const noexcept { return last_x_; }

 private:
  double last_x_;
};

// The solution left the domain box before reaching the requested x.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double exit_x)
      : Error(what), exit_x_(exit_x) {}
  double exit_x() const noexcept { return exit_x_; }

 private:
  double exit_x_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = -1, std::string field = {})
      : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        message_(what),
        line_(line),
        field_(std::move(field)) {}
  int line() const noexcept { return line_; }
  // The message without the line prefix.
  const std::string& message() const noexcept { return message_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string message_;
  int line_;
  std::string field_;
};

}  // namespace lamsmooth
