#ifndef HDPD_COMMON_ERROR_H_
#define HDPD_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace hdpd {

// Base class for every error raised by the library. Subclasses carry the
// category so that the CLI and the HTTP service can map them to exit codes and
// status codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something that violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input file or text. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A named entity (record, feature, disease, file) does not exist.
class NotFound : public Error {
 public:
  using Error::Error;
};

// A computation cannot proceed on the given data (e.g. single-class labels).
class ComputationError : public Error {
 public:
  using Error::Error;
};

// Persisted artifact was written by an incompatible format version.
class VersionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace hdpd

#endif  // HDPD_COMMON_ERROR_H_
