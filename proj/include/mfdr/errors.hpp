#pragma once

#include <stdexcept>
#include <string>

namespace mfdr {

// Bad user input: malformed files, invalid flag combinations, violated
// preconditions that a caller could have checked.  The CLI maps this to
// exit code 2.
class InvalidInput : public std::runtime_error {
 public:
  explicit InvalidInput(const std::string& msg) : std::runtime_error(msg) {}
};

// Failures that arise from the numbers themselves: saturated variance
// estimates, excess replicate failures, non-finite intermediates.  The CLI
// maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mfdr
