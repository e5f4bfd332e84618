#pragma once

#include <stdexcept>
#include <string>

namespace wg {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user input: bad flag values, unknown problem names, unsupported
// polynomial degrees, size limits exceeded.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File system and parse failures (mesh files, config files, output paths).
class IoError : public Error {
 public:
  using Error::Error;
};

// Linear algebra failures: CG breakdown, singular local blocks,
// eigensolver residual out of tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

// A numerical verification check did not hold.
class VerifyError : public Error {
 public:
  using Error::Error;
};

}  // namespace wg
