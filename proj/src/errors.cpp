#include "mvcalib/errors.hpp"

namespace mvcalib {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidRotation: return "InvalidRotation";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::DegenerateDepth: return "DegenerateDepth";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::DegenerateFocal: return "DegenerateFocal";
    case ErrorCode::BadGeometry: return "BadGeometry";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::NoConsensus: return "NoConsensus";
    case ErrorCode::Unsatisfiable: return "Unsatisfiable";
    case ErrorCode::OutOfFrame: return "OutOfFrame";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidRotation:
    case ErrorCode::NonFinite:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
    case ErrorCode::InvalidSpec:
      return 3;
    default:
      return 4;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace mvcalib
