#pragma once

#include <stdexcept>
#include <string>

namespace qseries {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A factor that must be inverted vanished within tolerance.
struct PoleError : Error {
  using Error::Error;
};

/// Term budget exhausted before the tail bound was met.
struct BudgetError : Error {
  using Error::Error;
};

/// A series was requested outside its convergence domain.
struct DivergentSeriesError : Error {
  using Error::Error;
};

/// An argument that must be nonzero was zero.
struct ZeroArgumentError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct SyntaxError : Error {
  SyntaxError(const std::string& what, int line, int column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line(line),
        column(column) {}
  int line;
  int column;
};

struct UnknownSymbolError : Error {
  using Error::Error;
};

struct DuplicateIdError : Error {
  using Error::Error;
};

struct UndeclaredSymbolError : Error {
  using Error::Error;
};

struct NotFoundError : Error {
  using Error::Error;
};

struct SamplingExhaustedError : Error {
  using Error::Error;
};

}  // namespace qseries
