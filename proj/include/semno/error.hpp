#pragma once

#include <stdexcept>
#include <string>

namespace semno {

/// Base class for every error raised by the toolkit. The CLI maps the
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration: unknown keys, missing columns, out-of-range parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Missing, malformed, out-of-date or mixed-lineage artifact files.
class ArtifactError : public Error {
 public:
  using Error::Error;
};

/// Failures while a stage is computing (divergence, empty results, I/O).
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace semno
