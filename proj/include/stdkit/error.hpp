#pragma once

#include <stdexcept>
#include <string>

namespace stdkit {

// Base class for all toolkit errors. Subclasses select the CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was called with inputs that violate its stated preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A file does not follow the container/image format it claims to be.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A container payload is shorter than its header declares.
class TruncationError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// An effect identifier is not part of the transition catalog.
class CatalogError : public Error {
 public:
  using Error::Error;
};

// A synthesis plan is structurally inconsistent with its shots.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Output of an external detector could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

// An external detector process failed.
class DetectorError : public Error {
 public:
  using Error::Error;
};

// An external detector exceeded its deadline.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

// A windowed inference run failed; the message names the window index.
class PipelineError : public Error {
 public:
  using Error::Error;
};

}  // namespace stdkit
