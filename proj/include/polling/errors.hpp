#pragma once

#include <stdexcept>
#include <string>

namespace polling {

/// Invalid parameters, malformed configuration, or out-of-domain arguments.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

/// The requested system has no steady state (rho >= 1, or a k-limited
/// queue cannot keep up with its arrivals over a mean cycle).
class StabilityError : public std::runtime_error {
 public:
  explicit StabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// A fixed-point iteration or limit computation failed to converge.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polling
