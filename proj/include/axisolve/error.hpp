#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace axisolve {

/// Failure categories raised by the solver stack.
enum class Errc {
  DimensionMismatch,
  IndexOutOfRange,
  ZeroPivot,
  ZeroRhs,
  Deadlock,
  MismatchedLength,
  MissingParticipant,
  Aborted,
  InvalidPartition,
  SingularPlan,
  DomainError,
  NonPositiveCoefficient,
  BoundaryViolation,
  Breakdown,
  MaxIterExceeded,
  InvalidBounds,
  QuadratureNotConverged,
  Overflow,
  Config,
  Io,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace axisolve
