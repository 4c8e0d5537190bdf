#pragma once

#include <string>
#include <vector>

#include "mixlab/degiorgi.hpp"

namespace mixlab {

enum class PositivityCase { plus, minus, zero, omega0 };
std::string to_string(PositivityCase c);

struct PositivityQuery {
  Point x;
  double t = 0.0;
  double rho = 0.0;
  double h_level = 1.0;
  double beta = 1.0;        // outer window, in units of h(x, 4 rho) rho^2
  double beta_tilde = 1.0;  // the shorter window used by the plus and minus cases
  double theta_hat = 0.5;
  PositivityCase kind = PositivityCase::plus;
};

struct ShrinkResult {
  std::vector<int> levels;
  std::vector<double> ratios;  // per level; omega0 holds a single worst combination
  double worst = 0.0;
  double bound = 0.0;             // 1 - 1/(2 q^2)
  double annulus_fraction = 0.0;  // w(B_4rho \ B_rho) / w(B_4rho)
  bool passes = false;
};

// Measures of {u < eta h} inside B_4rho over the case's window.
ShrinkResult level_set_shrink_check(const SpaceTimeField& u, const DgContext& ctx,
                                    const PositivityQuery& q, double eta, double q_doubling);

struct EtaLadder {
  double eta = 0.0;  // first rung of the descending ladder that passes, 0 if none
  std::vector<std::pair<double, double>> rungs;  // (eta, worst ratio)
};
EtaLadder shrink_eta_ladder(const SpaceTimeField& u, const DgContext& ctx, const PositivityQuery& q,
                            double q_doubling, int rungs = 20);

struct MeasureShrink {
  int m = -1;
  double eta1 = 0.0;
  double measure = 0.0, reference = 0.0;
  double lambda_measure = 0.0, lambda_reference = 0.0;
  bool seed_holds = false;
};

// Smallest m with eta / 2^m meeting the eps-smallness; the Lambda variant is checked
// against kappa eps^tau when kappa > 0.
MeasureShrink shrink_in_measure_check(const SpaceTimeField& u, const DgContext& ctx,
                                      const PositivityQuery& q, double eps, double eta = 0.5,
                                      double kappa = 0.0, double tau = 1.0, int rungs = 20);

struct Expansion {
  double lambda_hat = 0.0;
  int rung = 0;  // lambda_hat = 2^-rung
  double min_ratio = 0.0;
  int target_cells = 0;
  int n0 = 0, n1 = -1;
};

Expansion expansion_of_positivity_check(const SpaceTimeField& u, const DgContext& ctx,
                                        const PositivityQuery& q);

enum class HarnackCase { i, ii, iii, iv, mixed };
std::string to_string(HarnackCase c);

struct HarnackQuery {
  Point x;
  double t = 0.0;
  double rho = 0.0;
  double theta = 1.0;
  double omega = 1.0;
  HarnackCase kind = HarnackCase::i;
};

struct HarnackReport {
  double value_at_point = 0.0;
  double inf_over_target = 0.0;
  double sup_over_target = 0.0;
  double ratio = 1.0;
  double reversed_ratio = 1.0;  // mixed only
  std::string target;
  int target_cells = 0;
  int n0 = 0, n1 = -1;
  double h_rho = 0.0, h_4rho = 0.0;
  std::vector<double> trend;
};

HarnackReport harnack_constant(const SpaceTimeField& u, const DgContext& ctx, const HarnackQuery& q);
HarnackReport harnack_mixed(const SpaceTimeField& u, const DgContext& ctx, const HarnackQuery& q);

struct HolderFit {
  double alpha = 0.0;
  double r_squared = 1.0;
  bool capped = false;
  std::vector<double> rho, osc, window;
  double alpha_from_gamma = 0.0;
};

HolderFit holder_exponent(const SpaceTimeField& u, const DgContext& ctx, const Point& x, double t,
                          const std::vector<double>& radii, double gamma = 0.0);
// log2(g / (g - 1)) with g = max(gamma, 2).
double holder_alpha(double gamma);
std::string holder_csv(const HolderFit& fit);

enum class MaxVerdict { not_applicable, constant, violation };
std::string to_string(MaxVerdict v);

struct MaxPrinciple {
  MaxVerdict verdict = MaxVerdict::not_applicable;
  double value = 0.0;
  double neighborhood_max = 0.0;
  double deviation = 0.0;
  int witness_cell = -1, witness_level = -1;
  std::string reason;
};

MaxPrinciple max_principle_check(const SpaceTimeField& u, const DgContext& ctx, const Point& x,
                                 double t, double theta, double rho, double tol = 1e-10);

}  // namespace mixlab
