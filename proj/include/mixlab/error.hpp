#pragma once

#include <stdexcept>
#include <string>

namespace mixlab {

enum class ErrorKind {
  InvalidInput,
  NonPositiveWeight,
  NonPositiveLambda,
  EmptyFamily,
  BallEscapesDomain,
  NoFeasibleDelta,
  NoFeasibleTau,
  BadExponents,
  InfeasibleChain,
  ThresholdViolated,
  BadKappa,
  DegenerateLevels,
  PreconditionFailed,
  NotFound,
  SingularSystem,
  NonConvergence,
  DegenerateTest,
  CylinderEscapes,
  SeedConditionFailed,
  LadderExhausted,
  NoPositiveLambda,
  ContainmentFailed,
  NonPositiveField,
  NotOnInterface,
  InsufficientLadder,
  ScenarioError,
};

const char* to_string(ErrorKind kind);

// Hypothesis failures map to exit code 2, everything numerical to 3.
bool is_hypothesis_failure(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mixlab
