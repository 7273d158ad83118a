#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shellxy {

enum class ErrorCode {
  PointOffSurface,
  NotTangent,
  OutsideTubularNeighbourhood,
  InvalidSurface,
  WrongSurfaceKind,
  ResolutionTooLow,
  DegenerateTriangle,
  NonManifold,
  H4Unavailable,
  BallTooSmall,
  LengthMismatch,
  VanishingField,
  BadBarycentric,
  ChargeMismatch,
  QuadratureTooCoarse,
  HairyBallUnsupported,
  AmbiguousWinding,
  UnresolvedRegion,
  CoreOverlap,
  DefectsTooClose,
  DeltaTooSmall,
  NotConverged,
  PreconditionViolated,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shellxy
