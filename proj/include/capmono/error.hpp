#ifndef CAPMONO_ERROR_HPP
#define CAPMONO_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace capmono {

enum class ErrorKind {
  NonConvergence,
  Divergence,
  StepUnderflow,
  NoiseDominated,
  DomainError,
  CriterionMismatch,
  RootNotBracketed,
  NotApplicable,
  InsufficientSamples,
  NotThreeDimensional,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::Divergence: return "Divergence";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NoiseDominated: return "NoiseDominated";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::CriterionMismatch: return "CriterionMismatch";
    case ErrorKind::RootNotBracketed: return "RootNotBracketed";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::NotThreeDimensional: return "NotThreeDimensional";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (and tests) can branch on the category rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace capmono

#endif  // CAPMONO_ERROR_HPP
