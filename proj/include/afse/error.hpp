#pragma once

#include <stdexcept>
#include <string>

namespace afse {

// Base for every error raised by the library. Callers that only need to
// report a failure can catch this; the subclasses let the CLI and the
// review service map failures onto exit codes and HTTP statuses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument or precondition violation (wrong channel count, k > N, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Filesystem failure or undecodable image.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed manifest / document, or a missing required field.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class VersionError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

// A lookup by frame id failed.
class NotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace afse
