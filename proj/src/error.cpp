#include "icspp/error.hpp"

namespace icspp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidIndices: return "InvalidIndices";
    case ErrorCode::DegeneratePairs: return "DegeneratePairs";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace icspp
