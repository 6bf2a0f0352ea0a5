#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace embres {

// Raised when an iterative or direct solver cannot deliver its contract.
// Precondition violations use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double diagnostic = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), diagnostic_(diagnostic) {}

  // Attained residual, condition estimate, ... depending on the raiser.
  double diagnostic() const noexcept { return diagnostic_; }

 private:
  double diagnostic_;
};

}  // namespace embres
