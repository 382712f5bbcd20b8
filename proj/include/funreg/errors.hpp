#pragma once

#include <stdexcept>
#include <string>

namespace funreg {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidGridError : Error {
  using Error::Error;
};

struct GridMismatchError : Error {
  using Error::Error;
};

struct DegenerateFunctionError : Error {
  using Error::Error;
};

struct RankDeficiencyError : Error {
  using Error::Error;
};

struct SingularSystemError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Ingestion problems carry the offending file and line in the message.
struct IngestError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace funreg
