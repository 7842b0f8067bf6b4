#include "hiercubes/error.hpp"

namespace hiercubes {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnstableModel: return "UnstableModel";
    case ErrorCode::Undetermined: return "Undetermined";
    case ErrorCode::Divergent: return "Divergent";
    case ErrorCode::SaturatedProfile: return "SaturatedProfile";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::OutsideUnitBall: return "OutsideUnitBall";
    case ErrorCode::InfiniteEnergyOccupied: return "InfiniteEnergyOccupied";
    case ErrorCode::InfeasibleCounts: return "InfeasibleCounts";
    case ErrorCode::NoFixedPoints: return "NoFixedPoints";
    case ErrorCode::Tangent: return "Tangent";
    case ErrorCode::Diverging: return "Diverging";
    case ErrorCode::NotSummable: return "NotSummable";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::MixedEnsembles: return "MixedEnsembles";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
  }
  return "Unknown";
}

}  // namespace hiercubes
