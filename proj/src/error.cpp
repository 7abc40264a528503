#include "axisolve/error.hpp"

namespace axisolve {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::ZeroPivot: return "ZeroPivot";
    case Errc::ZeroRhs: return "ZeroRhs";
    case Errc::Deadlock: return "Deadlock";
    case Errc::MismatchedLength: return "MismatchedLength";
    case Errc::MissingParticipant: return "MissingParticipant";
    case Errc::Aborted: return "Aborted";
    case Errc::InvalidPartition: return "InvalidPartition";
    case Errc::SingularPlan: return "SingularPlan";
    case Errc::DomainError: return "DomainError";
    case Errc::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case Errc::BoundaryViolation: return "BoundaryViolation";
    case Errc::Breakdown: return "Breakdown";
    case Errc::MaxIterExceeded: return "MaxIterExceeded";
    case Errc::InvalidBounds: return "InvalidBounds";
    case Errc::QuadratureNotConverged: return "QuadratureNotConverged";
    case Errc::Overflow: return "Overflow";
    case Errc::Config: return "Config";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace axisolve
