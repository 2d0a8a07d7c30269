#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ebi {

enum class ErrorKind {
  invalid_input,
  insufficient_data,
  dimension,
  non_convergence,
  filter_design,
  unstable_filter,
  degenerate_dimension,
  precondition,
  undefined_correlation,
  invalid_spec,
  parse,
  internal,
};

const char* to_string(ErrorKind kind);

/// Compact %g rendering of a number for error messages.
std::string message_number(double v);

// Every library failure is reported through this type; `kind()` lets callers
// branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, std::size_t sweeps)
      : Error(ErrorKind::non_convergence, message), sweeps_(sweeps) {}

  std::size_t sweeps() const noexcept { return sweeps_; }

 private:
  std::size_t sweeps_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ebi
