#pragma once

#include <string>
#include <vector>

#include "mixlab/kernels.hpp"
#include "mixlab/weights.hpp"

namespace mixlab {

enum class CylinderKind { plus, minus, zero, iv, v };
std::string to_string(CylinderKind k);

struct CylinderSpec {
  Point x0;
  double t0 = 0.0;
  double R = 0.0, r = 0.0, r_tilde = 0.0;
  double beta = 1.0;
  double theta = 0.0, theta_tilde = 0.0;
  double eps = 0.0;
  CylinderKind kind = CylinderKind::plus;
  double s1 = 0.0, s2 = 0.0;
  double h = 1.0;  // h(x0, R)

  double sigma(double th) const { return th * beta * h * R * R; }
};

// Everything the energy displays need about the coefficients.
struct DgContext {
  GridDomain grid;
  SignPartition part;
  std::vector<double> mu_plus, mu_minus, lambda;
  std::vector<double> lambda_plus, lambda_minus, lambda_zero;
  std::vector<double> mu_lambda_abs;

  DgContext(const WeightField& mu, const WeightField& lambda, double zero_tol = 0.0);
  double h(const Point& x0, double R) const;
  // B_rho^s as sorted cells.
  std::vector<int> ball(const Point& x0, double rho, Label s) const;
};

struct CylinderLadder {
  std::vector<std::pair<double, double>> radii{{0.5, 0.75}};  // (r / R, r~ / R)
  std::vector<double> theta_tilde{0.0, 0.25};
  std::vector<double> eps_fractions{0.0, 0.5, 1.0};  // of R - r~
};

// For kind zero the window (s1, s2) is taken as given; otherwise it is derived.
std::vector<CylinderSpec> build_cylinders(const DgContext& ctx, const Point& x0, double t0, double R,
                                          double beta, CylinderKind kind,
                                          const CylinderLadder& ladder, double s1 = 0.0,
                                          double s2 = 0.0);

// Space index sets Q^{±,δ}_{R;ρ,θ}: cells over the late part of the window and extra cells
// over the early part (t0, t0 + σθ) or (t0 - σθ, t0).
struct CylinderPieces {
  std::vector<int> late_cells, early_cells;
  int late_n0 = 0, late_n1 = -1, early_n0 = 0, early_n1 = -1;
};
CylinderPieces q_sets(const DgContext& ctx, const CylinderSpec& spec, double rho, double theta,
                      double delta);
// Q^{±}_{R;ρ,θ} = B_ρ^± times the late window; Q^0 for kind zero.
CylinderPieces q_plain_sets(const DgContext& ctx, const CylinderSpec& spec, double rho, double theta);

struct EnergyRecord {
  CylinderKind kind = CylinderKind::plus;
  int sign = 1;
  double k = 0.0;
  double eps = 0.0;
  double theta_tilde = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;       // without gamma; for iv and v the gamma term only
  double free_terms = 0.0;  // iv and v: right-hand terms not multiplied by gamma
  double implied_gamma = 0.0;
  bool empty = false;
};

EnergyRecord energy_sides(const SpaceTimeField& u, double k, const CylinderSpec& spec,
                          const DgContext& ctx, int sign);

struct DgSweep {
  std::vector<Point> centers;
  std::vector<double> radii;
  double t0 = -1.0;  // negative means half the final time
  double beta = 1.0;
  CylinderLadder ladder;
  int k_levels = 16;
};

// Centres at interior lattice points and R a quarter of the shortest side.
DgSweep default_sweep(const GridDomain& grid);

struct EnergyReport {
  std::vector<EnergyRecord> records;
  double gamma = 1.0;
  double gamma_plus = 1.0, gamma_minus = 1.0;
  bool in_dg_plus = true, in_dg_minus = true;
  int worst = -1;
};

EnergyReport gamma_fit(const SpaceTimeField& u, const DgContext& ctx, const DgSweep& sweep);

enum class LinftyCase { i, ii, iii };

struct LinftyResult {
  double ess_sup = 0.0;
  double energy = 0.0;
  double c_inf = 0.0;
};

LinftyResult linfty_check(const SpaceTimeField& u, const DgContext& ctx, const Point& x0, double t0,
                          double R, double beta, LinftyCase which);

// Constant C+ of the truncation iteration.
double c_plus(double gamma, double gamma1, double kappa, double beta);
// d = 2 C+^(1/a) 3^-1 4^(2/a + 1/a^2 + 1) u0 with a = (kappa - 1) / kappa.
double linfty_d(double c_plus, double kappa, double u0);
double smallness_threshold(double c_plus, double kappa, double d);

struct TruncationTrace {
  std::vector<double> k, r, theta, value;
  bool nonincreasing = true;
};

TruncationTrace truncation_iteration_trace(const SpaceTimeField& u, const DgContext& ctx, double k0,
                                           double d, double R, const Point& x0, double t0,
                                           double beta, int terms = 12);

}  // namespace mixlab
