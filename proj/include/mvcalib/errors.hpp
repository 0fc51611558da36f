#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvcalib {

enum class ErrorCode {
  // data / format
  InvalidArgument,
  InvalidRotation,
  NonFinite,
  ShapeMismatch,
  ParseError,
  IoError,
  InvalidSpec,
  // numerical / geometric
  RankDeficient,
  Degenerate,
  BehindCamera,
  DegenerateDepth,
  TooFewPoints,
  DegenerateConfiguration,
  NotNormalized,
  DegenerateFocal,
  BadGeometry,
  DegenerateGeometry,
  NoConsensus,
  Unsatisfiable,
  OutOfFrame,
};

std::string_view to_string(ErrorCode code);

/// Exit status the command-line front end reports for an error code:
/// 3 for data/format problems, 4 for numerical or geometric failures.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mvcalib
