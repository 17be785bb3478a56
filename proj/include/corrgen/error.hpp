#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace corrgen {

// Base of every error raised by the library. Callers that only need a
// message can catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad caller input: wrong sizes, missing waypoints, invalid configs.
class InputError : public Error {
 public:
  using Error::Error;
};

// Path parameter outside the domain of a path or polynomial.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Geometry collapsed: duplicate waypoints, indefinite ellipse matrix.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. Carries the 1-based line (0 when not line oriented).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The assembled program has no bounded optimum (no wrapper, no eigenvalue bounds).
class UnboundedProblemError : public Error {
 public:
  using Error::Error;
};

// Solver returned anything other than an optimal point.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace corrgen
