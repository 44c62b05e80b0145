#pragma once

#include <stdexcept>
#include <string>

namespace wegnerlab {

enum class ErrorCode {
  InvalidArgument,
  FluxNotQuantized,
  DimensionMismatch,
  DimensionExceeded,
  VectorsNotRetained,
  EmptyProjector,
  ShiftTooSmall,
  DegenerateFit,
  NotAProjector,
  NoAdmissibleFlux,
  NonPositiveData,
  NotPositiveSemidefinite,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FluxNotQuantized: return "FluxNotQuantized";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DimensionExceeded: return "DimensionExceeded";
    case ErrorCode::VectorsNotRetained: return "VectorsNotRetained";
    case ErrorCode::EmptyProjector: return "EmptyProjector";
    case ErrorCode::ShiftTooSmall: return "ShiftTooSmall";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::NotAProjector: return "NotAProjector";
    case ErrorCode::NoAdmissibleFlux: return "NoAdmissibleFlux";
    case ErrorCode::NonPositiveData: return "NonPositiveData";
    case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
  }
  return "Unknown";
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace wegnerlab
