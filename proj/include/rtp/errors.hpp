#pragma once

#include <stdexcept>
#include <string>

namespace rtp {

// Requested work exceeds a configured budget (matrix entry cap, enumeration size).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric routine produced a result outside its accuracy contract.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver ran out of iterations; carries the last residual seen.
class NonConvergenceError : public NumericError {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : NumericError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace rtp
