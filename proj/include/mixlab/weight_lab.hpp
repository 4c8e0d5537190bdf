#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixlab/kernels.hpp"
#include "mixlab/weights.hpp"

namespace mixlab {

struct BallFamily {
  std::vector<Point> centers;
  std::vector<double> radii;  // ascending
  std::optional<std::array<double, 4>> restriction;  // xmin, ymin, xmax, ymax for centres

  // radii r_min * 2^k up to r_max.
  static BallFamily dyadic(std::vector<Point> centers, double r_min, double r_max);
  // Adds `count` grid nodes drawn uniformly from the box (or the whole grid).
  void add_random_nodes(const GridDomain& grid, int count, std::uint64_t seed,
                        std::optional<std::array<double, 4>> box = std::nullopt);

  std::vector<Point> usable_centers() const;
  // Centre-major list of all balls.
  std::vector<Ball> balls() const;
  std::size_t size() const { return balls().size(); }
};

struct Measured {
  double value = 0.0;
  Ball witness;
  std::size_t family_size = 0;
};

struct AInfty {
  double K = 1.0;
  double varsigma = 1.0;
  Ball witness;
  std::size_t family_size = 0;
  bool within_cap = true;
};

struct ReverseHolder {
  double delta = 0.0;
  double c_rh = 1.0;
  Ball witness;
  std::size_t family_size = 0;
};

struct KappaTau {
  double kappa = 1.0;
  double tau = 1.0;
  Ball witness;
  std::size_t family_size = 0;
};

struct HP2Prime {
  double alpha = 0.0;
  double q_tilde = 0.0;
  double K2_tilde = 0.0;
  double delta = 0.0;
};

struct H4Result {
  double q = 1.0;  // the constant 𝔮
  Ball witness;
  std::string line;  // mu_plus, mu_minus or lambda_zero
  std::size_t family_size = 0;
};

// Grid of exponents 1, 0.99, ..., 0.01 used for ς and τ.
std::vector<double> exponent_grid();

Measured ap_constant(const WeightField& w, double p, const BallFamily& family);

AInfty a_infty_params(const WeightField& w, const BallFamily& family, int subset_samples,
                      std::uint64_t seed = 1, double k_cap = 2.0);

Measured doubling_constant(const WeightField& w, const BallFamily& family);

ReverseHolder reverse_holder_fit(const WeightField& w, const BallFamily& family,
                                 const std::vector<double>& delta_grid, double p = 2.0,
                                 double c_cap = 10.0);

Measured pair_condition_constant(const WeightField& nu, const WeightField& omega, double p,
                                 double q, double alpha, const BallFamily& family);

WeightField build_mu_lambda_abs(const WeightField& mu, const WeightField& lambda,
                                double zero_tol = 0.0);

H4Result h4_constant(const WeightField& mu, const WeightField& lambda, const SignPartition& part,
                     const BallFamily& family);

std::vector<std::pair<double, double>> h5_decay(const SignPartition& part,
                                                const std::vector<double>& eps_list);
// Least-squares a + b e + c e^2 through the decay data; returns a.
double h5_intercept(const std::vector<std::pair<double, double>>& decay);

double h_of(const Point& x0, double rho, const WeightField& mu_lambda_abs,
            const WeightField& lambda);
double f_of(const Point& x0, double rho, const WeightField& mu_lambda_abs,
            const WeightField& lambda);

KappaTau kappa_tau(const WeightField& mu_lambda_abs, const WeightField& lambda,
                   const BallFamily& family, int subset_samples, std::uint64_t seed = 1,
                   double kappa_cap = 2.0);

// delta <= 0 picks half of the admissible bound.
HP2Prime hp2_prime(double K2, double q, double c_rh, double varsigma, double delta, int n);

struct AuditSettings {
  double q = 4.0;  // exponent of the pair condition (H.2)
  double zero_tol = 0.0;
  int subset_samples = 8;
  std::uint64_t seed = 1;
  double a_infty_cap = 2.0;
  double kappa_cap = 2.0;
  double rh_cap = 10.0;
  std::vector<double> delta_grid{1.0, 0.5, 0.25, 0.1, 0.05, 0.01};
  std::vector<double> eps_list;  // empty: multiples of the cell size
  double h4_cap = 1000.0;

  bool operator==(const AuditSettings&) const = default;
};

struct WeightAudit {
  Measured K1;
  Measured K2;
  AInfty K3;
  Measured doubling_lambda;
  Measured doubling_mu_lambda_abs;
  ReverseHolder rh;
  H4Result h4;
  std::vector<std::pair<double, double>> h5;
  double h5_intercept = 0.0;
  double cell_area = 0.0;
  KappaTau kt;
  HP2Prime hp2;
  bool hp2_feasible = true;
  std::vector<std::string> failures;  // hypothesis failures detected
};

WeightAudit run_weight_audit(const WeightField& mu, const WeightField& lambda,
                             const BallFamily& family, const AuditSettings& settings);

}  // namespace mixlab
