#pragma once

#include <stdexcept>
#include <string>

namespace nait {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or length mismatch on a call argument.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Hyperparameter or configuration outside its valid range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Query against an index holding no points.
class EmptyIndex : public Error {
 public:
  using Error::Error;
};

// Call sequence violation, e.g. stepping a finished environment.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or version-mismatched binary file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace nait
