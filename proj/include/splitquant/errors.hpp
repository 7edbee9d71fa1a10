#pragma once

#include <stdexcept>
#include <string>

namespace splitquant {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The file is not a container at all (bad header, unparseable manifest).
struct FormatError : Error {
  using Error::Error;
};

// The file parses but its byte layout is inconsistent (offsets overlap,
// run past the payload, or leave gaps).
struct CorruptionError : Error {
  using Error::Error;
};

// A graph or tensor invariant does not hold.
struct ValidationError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct ArgumentError : Error {
  using Error::Error;
};

// Raised by the interpreter: shape mismatch at run time or a non-finite
// intermediate value.
struct ExecutionError : Error {
  using Error::Error;
};

// Input too small or too uniform for the requested operation.
struct DegenerateInput : Error {
  using Error::Error;
};

}  // namespace splitquant
