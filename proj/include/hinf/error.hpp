#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hinf {

enum class ErrorCode {
  DimensionMismatch,
  EmptySystem,
  EigensolveFailure,
  SingularShift,
  NonSimpleSingularValue,
  DegenerateSpectrum,
  GammaNearSingularValueOfD,
  MissingEigenvectors,
  NoSeedsAvailable,
  ParseError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySystem: return "EmptySystem";
    case ErrorCode::EigensolveFailure: return "EigensolveFailure";
    case ErrorCode::SingularShift: return "SingularShift";
    case ErrorCode::NonSimpleSingularValue: return "NonSimpleSingularValue";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::GammaNearSingularValueOfD: return "GammaNearSingularValueOfD";
    case ErrorCode::MissingEigenvectors: return "MissingEigenvectors";
    case ErrorCode::NoSeedsAvailable: return "NoSeedsAvailable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace hinf
