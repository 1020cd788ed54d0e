#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracocp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two fields (or a field and an operator) live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A structural hypothesis on F or L (monotonicity, parameter ranges) is violated.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

/// Newton / line-search / eigen-solver failure. Carries the residual history when available.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}

  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// Syntax error in an expression, with the byte offset where it was detected.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Invalid run configuration. `pointer` is a JSON pointer to the offending field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& pointer, const std::string& what)
      : Error((pointer.empty() ? std::string("(root)") : pointer) + ": " + what), pointer_(pointer) {}

  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace fracocp
