#include "mixlab/error.hpp"

namespace mixlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorKind::NonPositiveLambda: return "NonPositiveLambda";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::BallEscapesDomain: return "BallEscapesDomain";
    case ErrorKind::NoFeasibleDelta: return "NoFeasibleDelta";
    case ErrorKind::NoFeasibleTau: return "NoFeasibleTau";
    case ErrorKind::BadExponents: return "BadExponents";
    case ErrorKind::InfeasibleChain: return "InfeasibleChain";
    case ErrorKind::ThresholdViolated: return "ThresholdViolated";
    case ErrorKind::BadKappa: return "BadKappa";
    case ErrorKind::DegenerateLevels: return "DegenerateLevels";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DegenerateTest: return "DegenerateTest";
    case ErrorKind::CylinderEscapes: return "CylinderEscapes";
    case ErrorKind::SeedConditionFailed: return "SeedConditionFailed";
    case ErrorKind::LadderExhausted: return "LadderExhausted";
    case ErrorKind::NoPositiveLambda: return "NoPositiveLambda";
    case ErrorKind::ContainmentFailed: return "ContainmentFailed";
    case ErrorKind::NonPositiveField: return "NonPositiveField";
    case ErrorKind::NotOnInterface: return "NotOnInterface";
    case ErrorKind::InsufficientLadder: return "InsufficientLadder";
    case ErrorKind::ScenarioError: return "ScenarioError";
  }
  return "Unknown";
}

bool is_hypothesis_failure(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveWeight:
    case ErrorKind::NonPositiveLambda:
    case ErrorKind::NoFeasibleDelta:
    case ErrorKind::NoFeasibleTau:
    case ErrorKind::InfeasibleChain:
    case ErrorKind::ThresholdViolated:
    case ErrorKind::BadKappa:
    case ErrorKind::PreconditionFailed:
    case ErrorKind::SeedConditionFailed:
    case ErrorKind::NoPositiveLambda:
    case ErrorKind::ContainmentFailed:
    case ErrorKind::NonPositiveField:
    case ErrorKind::NotOnInterface:
    case ErrorKind::BallEscapesDomain:
    case ErrorKind::CylinderEscapes:
      return true;
    default:
      return false;
  }
}

}  // namespace mixlab
