#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvsis {

enum class ErrorKind {
  invalid_argument,
  dimension_mismatch,
  domain_violation,
  assumption_violation,
  precondition,
  convergence,
  degenerate,
  parse,
  io,
};

std::string_view to_string(ErrorKind kind);

/// Library error. `origin` names the module and operation that raised it
/// (e.g. "model-core.step") so the CLI can report where a failure came from.
class Error : public std::runtime_error {
 public:
  Error(std::string origin, ErrorKind kind, const std::string& message);

  const std::string& origin() const noexcept { return origin_; }
  ErrorKind kind() const noexcept { return kind_; }

 private:
  std::string origin_;
  ErrorKind kind_;
};

}  // namespace mvsis
