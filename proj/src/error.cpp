#include "symorb/error.hpp"

namespace symorb {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::structure: return "structure";
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::linearization: return "linearization";
    case ErrorKind::orientation: return "orientation";
    case ErrorKind::manifold_departure: return "manifold-departure";
    case ErrorKind::bound_too_weak: return "bound-too-weak";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::total_collision: return "total-collision";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::ambiguous_bracket: return "ambiguous-bracket";
    case ErrorKind::unavailable: return "unavailable";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

}  // namespace symorb
