#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mixlab/kernels.hpp"
#include "mixlab/weights.hpp"

namespace mixlab {

enum class FieldHypothesis { support_in_ball, zero_mean, none };

struct SpatialField {
  std::vector<double> values;
  FieldHypothesis hypothesis = FieldHypothesis::none;
};

struct Sides {
  double lhs = 0.0;
  double rhs = 0.0;
  bool hypothesis_unverified = false;
  bool impossible = false;  // rhs vanishes while lhs does not
  double ratio() const;
};

// Whether u meets its declared hypothesis on the ball, within a relative tolerance.
bool hypothesis_holds(const SpatialField& u, const WeightField& nu, const Ball& ball,
                      double tol = 1e-8);

// rhs is reported without the factor γ1.
Sides sobolev_poincare_sides(const SpatialField& u, const WeightField& nu, const WeightField& omega,
                             double p, double q, const Ball& ball);

Sides gut_whee_sides(const SpatialField& u, const std::vector<int>& A, const WeightField& nu,
                     const WeightField& omega, const WeightField& upsilon, double kappa,
                     const Ball& ball, double gamma1,
                     double varsigma1 = std::numeric_limits<double>::infinity());

Sides two_level_set_check(const SpatialField& v, double k, double l, const std::vector<int>& Z,
                          const WeightField& nu, const WeightField& omega, double p, double q,
                          const Ball& ball, double gamma1 = 1.0);

enum class TimeIntegrated { sobolev_poincare, two_level_set, gut_whee };

struct TimeIntegratedParams {
  TimeIntegrated which = TimeIntegrated::sobolev_poincare;
  double p = 2.0;
  double gamma1 = 1.0;
  double k = 0.0, l = 1.0;        // two_level_set
  std::vector<int> Z;             // two_level_set
  std::vector<int> A;             // gut_whee, A(t) = A
  double kappa = 1.5;             // gut_whee
  const WeightField* upsilon = nullptr;  // gut_whee, defaults to nu
};

// Time-integrated displays on [a, b]; sobolev_poincare rhs is reported without γ1.
Sides time_integrated_sides(const SpaceTimeField& u, const WeightField& nu, const WeightField& omega,
                            const Ball& ball, double a, double b, const TimeIntegratedParams& params);

struct ConcentrationResult {
  bool found = false;
  Point center;
  double eta = 0.0;
  double radius = 0.0;
  double fraction = 0.0;  // ν({u > ε} ∩ B) / ν(B)
};

ConcentrationResult concentration_search(const SpatialField& u, const std::vector<int>& B,
                                         double sigma, double alpha, double beta, double eps,
                                         double delta, const WeightField& nu,
                                         const WeightField& omega, const Ball& ball);

}  // namespace mixlab
