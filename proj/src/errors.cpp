#include "hpcalc/errors.hpp"

namespace hpcalc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::NotInDomain: return "NotInDomain";
    case ErrorKind::SingularAtZero: return "SingularAtZero";
    case ErrorKind::PanelBudgetExceeded: return "PanelBudgetExceeded";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::NotDiagonalizable: return "NotDiagonalizable";
    case ErrorKind::DomainError: return "DomainError";
  }
  return "Unknown";
}

std::string_view to_string(Diagnosis diagnosis) {
  switch (diagnosis) {
    case Diagnosis::Converged: return "Converged";
    case Diagnosis::DivergentTail: return "DivergentTail";
    case Diagnosis::SingularAtZero: return "SingularAtZero";
    case Diagnosis::PanelBudgetExceeded: return "PanelBudgetExceeded";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what,
             std::optional<Diagnosis> diagnosis)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind),
      diagnosis_(diagnosis) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hpcalc
