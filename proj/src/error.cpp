#include "shellxy/error.hpp"

namespace shellxy {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PointOffSurface: return "PointOffSurface";
    case ErrorCode::NotTangent: return "NotTangent";
    case ErrorCode::OutsideTubularNeighbourhood: return "OutsideTubularNeighbourhood";
    case ErrorCode::InvalidSurface: return "InvalidSurface";
    case ErrorCode::WrongSurfaceKind: return "WrongSurfaceKind";
    case ErrorCode::ResolutionTooLow: return "ResolutionTooLow";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::NonManifold: return "NonManifold";
    case ErrorCode::H4Unavailable: return "H4Unavailable";
    case ErrorCode::BallTooSmall: return "BallTooSmall";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::VanishingField: return "VanishingField";
    case ErrorCode::BadBarycentric: return "BadBarycentric";
    case ErrorCode::ChargeMismatch: return "ChargeMismatch";
    case ErrorCode::QuadratureTooCoarse: return "QuadratureTooCoarse";
    case ErrorCode::HairyBallUnsupported: return "HairyBallUnsupported";
    case ErrorCode::AmbiguousWinding: return "AmbiguousWinding";
    case ErrorCode::UnresolvedRegion: return "UnresolvedRegion";
    case ErrorCode::CoreOverlap: return "CoreOverlap";
    case ErrorCode::DefectsTooClose: return "DefectsTooClose";
    case ErrorCode::DeltaTooSmall: return "DeltaTooSmall";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace shellxy
