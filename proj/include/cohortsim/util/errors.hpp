#pragma once

#include <stdexcept>
#include <string>

namespace cohortsim {

// Error taxonomy used across the library.  The CLI maps these onto process
// exit codes, so every throw site should pick the category deliberately:
//   ConfigError    -> malformed or inconsistent configuration (exit 2)
//   DataError      -> unreadable / schema-violating input data  (exit 3)
//   NumericError   -> numerical failure (non-convergence, bad domain) (exit 4)
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what) {}
};

}  // namespace cohortsim
