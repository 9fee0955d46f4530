#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cartan {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Errors about the mathematical content of a request (not its syntax).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ExponentOverflow : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotDivisible : public DomainError {
 public:
  using DomainError::DomainError;
};

class NonPolynomial : public DomainError {
 public:
  using DomainError::DomainError;
};

class BadRadii : public DomainError {
 public:
  using DomainError::DomainError;
};

class RingMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

class DegreeMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotAHomomorphism : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotRelated : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotTangent : public DomainError {
 public:
  NotTangent(std::size_t generator, std::string reduction)
      : DomainError("vector field does not preserve ideal generator #" + std::to_string(generator) +
                    " (reduction " + reduction + ")"),
        generator_(generator),
        reduction_(std::move(reduction)) {}

  std::size_t generator() const noexcept { return generator_; }
  const std::string& reduction() const noexcept { return reduction_; }

 private:
  std::size_t generator_;
  std::string reduction_;
};

class IdealMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

class WrongIdeal : public DomainError {
 public:
  using DomainError::DomainError;
};

class Incompatible : public DomainError {
 public:
  using DomainError::DomainError;
};

class IncompatibleFamily : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidPoset : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed textual input. `column` is the 0-based offset into the input.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t column)
      : Error(what + " at column " + std::to_string(column)), column_(column) {}

  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class UnknownIdentifier : public SyntaxError {
 public:
  UnknownIdentifier(const std::string& name, std::size_t column)
      : SyntaxError("unknown identifier '" + name + "'", column), name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

}  // namespace cartan
