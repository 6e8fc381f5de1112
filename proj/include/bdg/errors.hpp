#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bdg {

// Base of every error raised by the library. CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failures (exit code 4 at the CLI).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  NoConvergence(const std::string& what, std::size_t max_iter)
      : NumericalError(what), max_iter_(max_iter) {}
  std::size_t max_iter() const noexcept { return max_iter_; }

 private:
  std::size_t max_iter_;
};

class DegenerateEdge : public NumericalError {
 public:
  DegenerateEdge(const std::string& what, int i, int j)
      : NumericalError(what), i_(i), j_(j) {}
  int i() const noexcept { return i_; }
  int j() const noexcept { return j_; }

 private:
  int i_;
  int j_;
};

// Caller handed in something that violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidEdge : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InvalidMove : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InvalidDimension : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DomainError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InvalidBasisSize : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class EmptyTrace : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NoSnapshots : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Configuration problems (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input files (exit code 3). Row and column are 1-based; 0 = unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t col = 0)
      : Error(format(what, row, col)), row_(row), col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  static std::string format(const std::string& what, std::size_t row, std::size_t col) {
    if (row == 0) return what;
    std::string s = what + " (row " + std::to_string(row);
    if (col != 0) s += ", col " + std::to_string(col);
    return s + ")";
  }
  std::size_t row_;
  std::size_t col_;
};

}  // namespace bdg
