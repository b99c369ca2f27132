#pragma once

#include <stdexcept>
#include <string>

namespace canline {

/// Base class for all canline errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number of the offending line.
struct ParseError : Error {
  ParseError(int line, const std::string& what_reason)
      : Error("line " + std::to_string(line) + ": " + what_reason),
        line_no(line),
        reason(what_reason) {}

  int line_no;
  std::string reason;
};

/// Invalid or inconsistent configuration.
struct ConfigError : Error {
  using Error::Error;
};

/// Filesystem or stream failure.
struct IoError : Error {
  using Error::Error;
};

/// Telemetry sink closed or unreachable.
struct TransportError : Error {
  using Error::Error;
};

}  // namespace canline
