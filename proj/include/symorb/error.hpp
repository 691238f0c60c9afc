#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace symorb {

enum class ErrorKind {
  domain,              // argument outside the operation's domain
  singularity,         // evaluation at a potential singularity
  structure,           // unexpected critical-point structure
  evaluation,          // NaN/inf produced by a vector field
  linearization,       // defective or ill-conditioned Jacobian
  orientation,         // eigenvector cannot be oriented
  manifold_departure,  // comparison ODE left the collision manifold chart
  bound_too_weak,      // certificate integrand negative
  divergence,          // divergent special-function value
  total_collision,     // no configuration velocities at r = 0
  not_found,           // orbit search found no bracket
  ambiguous_bracket,   // signature changes inside the bisection bracket
  unavailable,         // required landmark missing
  usage,               // invalid CLI / config input
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace symorb
