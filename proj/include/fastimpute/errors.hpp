#pragma once

#include <stdexcept>
#include <string>

namespace fastimpute {

// Bad caller-supplied values: dimensions, ranks, fractions out of range.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Unreadable or malformed external input (files). Messages name the file
// and, where known, the offending line.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure that survived the built-in fallbacks.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fastimpute
