#include "iontherm/errors.hpp"

namespace iontherm {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::TruncationTooSmall: return "truncation-too-small";
    case ErrorKind::OutOfTaper: return "out-of-taper";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::DimensionTooLarge: return "dimension-too-large";
  }
  return "unknown";
}

}  // namespace iontherm
