#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diffred {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is a 0-based character offset.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position + 1)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownVariableError : public Error {
 public:
  UnknownVariableError(const std::string& name, std::size_t position)
      : Error("unknown variable '" + name + "' at position " +
              std::to_string(position + 1)),
        name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class DivisionByZeroError : public Error {
 public:
  using Error::Error;
};

/// A denominator vanishes at the requested evaluation point.
class PoleError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class DegreeError : public Error {
 public:
  using Error::Error;
};

/// Numeric integration could not continue (pole on a path, collapsing det T).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Problem/transform file validation failure.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace diffred
