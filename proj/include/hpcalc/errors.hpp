#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hpcalc {

enum class ErrorKind {
  InvalidArgument,
  NonConvergent,
  NotInDomain,
  SingularAtZero,
  PanelBudgetExceeded,
  PreconditionFailed,
  ValidationFailed,
  NotInvertible,
  Inconclusive,
  NotDiagonalizable,
  DomainError,
};

/// Outcome classification of a half-line integral.
enum class Diagnosis {
  Converged,
  DivergentTail,
  SingularAtZero,
  PanelBudgetExceeded,
};

std::string_view to_string(ErrorKind kind);
std::string_view to_string(Diagnosis diagnosis);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<Diagnosis> diagnosis = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  /// Set when the failure originates from a quadrature verdict.
  std::optional<Diagnosis> diagnosis() const noexcept { return diagnosis_; }

 private:
  ErrorKind kind_;
  std::optional<Diagnosis> diagnosis_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace hpcalc
