#pragma once

#include <stdexcept>
#include <string>

namespace ocdesign {

// Invalid configuration input (bad file, schema violation, out-of-range
// design constant). Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument to a library operation.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what)
      : std::invalid_argument(what) {}
};

// No (n, gamma) combination satisfies the operating characteristic
// criteria within the search cap. Maps to CLI exit code 2.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what)
      : std::runtime_error(what) {}
};

// Numerical failure (posterior optimization did not converge, degenerate
// linear system, ...). Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace ocdesign
