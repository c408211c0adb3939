#pragma once

#include <stdexcept>
#include <string>

namespace scqa {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class KeyViolation : public Error {
 public:
  using Error::Error;
};

class UnsupportedPredicate : public Error {
 public:
  using Error::Error;
};

/// Raised when a violation no longer holds in the node it is applied to.
class StaleViolation : public Error {
 public:
  using Error::Error;
};

/// Raised when an internal invariant of the repair/core machinery fails.
/// The CLI maps this to a non-zero exit.
class InvariantFailure : public Error {
 public:
  using Error::Error;
};

class NonBasicQuery : public Error {
 public:
  using Error::Error;
};

}  // namespace scqa
