#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mimosel {

enum class ErrorCategory {
  invalid_argument,
  parse,
  numerical,
  infeasible,
  non_convergence,
  budget,
  io,
};

const char* to_string(ErrorCategory category);

/// Base class of every exception raised by the library. The category drives
/// the command-line exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCategory::invalid_argument, what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCategory::parse,
              line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A Hermitian factorization failed: the matrix is not positive definite.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(const std::string& what)
      : Error(ErrorCategory::numerical, what) {}
};

class InfeasibleProgram : public Error {
 public:
  explicit InfeasibleProgram(const std::string& what)
      : Error(ErrorCategory::infeasible, what) {}
};

class NonConvergence : public Error {
 public:
  explicit NonConvergence(const std::string& what)
      : Error(ErrorCategory::non_convergence, what) {}
};

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& what)
      : Error(ErrorCategory::budget, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace mimosel
