#pragma once

#include <stdexcept>
#include <string>

namespace rbm {

/// Root of every error the kernel raises. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (exit status 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition does not hold (exit status 1).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Two objects built over different probability measures were combined.
class MeasureMismatch : public Error {
 public:
  using Error::Error;
};

/// A modulated sequence broke the convergence envelope its modulus promised.
class ModulusViolation : public Error {
 public:
  using Error::Error;
};

/// A recursion schema produced a value above its declared bound.
class BoundViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed textual input: s-expressions, files, numerals (exit status 2).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}
  explicit ParseError(const std::string& what)
      : Error(what), position_(std::string::npos) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A computation would exceed the configured magnitude cap (exit status 3).
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace rbm
