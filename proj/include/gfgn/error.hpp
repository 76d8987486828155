#pragma once

#include <stdexcept>
#include <string>

namespace gfgn {

// Shape or index mismatch between tensors/operators. Messages name both shapes.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Invalid configuration value (hyperparameter out of range, bad flag combination).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or missing input data. Carries file/line context where available.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: divergent iteration, non-finite loss, eigensolver stall.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gfgn
