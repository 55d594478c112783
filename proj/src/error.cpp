#include "mvsis/error.hpp"

namespace mvsis {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::domain_violation: return "domain_violation";
    case ErrorKind::assumption_violation: return "assumption_violation";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(std::string origin, ErrorKind kind, const std::string& message)
    : std::runtime_error(message), origin_(std::move(origin)), kind_(kind) {}

}  // namespace mvsis
