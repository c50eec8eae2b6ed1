#pragma once

#include <stdexcept>
#include <string>

namespace bequest {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A market or configuration parameter violates its invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A per-regime constructor was called on parameters belonging to another regime.
class RegimeMismatch : public Error {
 public:
  using Error::Error;
};

class RootError : public Error {
 public:
  enum class Kind { NoSignChange, MaxIterExceeded, BracketNotFound };

  RootError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_change)
      : Error(what), last_change_(last_change) {}

  double last_change() const noexcept { return last_change_; }

 private:
  double last_change_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bequest
