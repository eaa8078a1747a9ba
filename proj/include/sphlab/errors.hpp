#pragma once

#include <stdexcept>
#include <string>

namespace sphlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input that is valid in form but degenerate in value: rank-deficient
/// matrices, principal cosines equal to 0 or 1, singular Gram matrices.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A configuration breaks one of the analytic hypotheses an experiment is
/// meant to test (e.g. k > alpha1 * sqrt(n)). The message names the
/// constraint.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; `position` is the 0-based offset of the offending
/// character.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " (at position " + std::to_string(position) + ")"), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// An invalid experiment configuration; `field` names the offending key.
class UsageError : public Error {
 public:
  UsageError(const std::string& field, const std::string& message)
      : Error(field + ": " + message), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace sphlab
