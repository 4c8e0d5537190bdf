#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mixlab/expression.hpp"
#include "mixlab/kernels.hpp"
#include "mixlab/weights.hpp"

namespace mixlab {

// Where the data of the {mu < 0} region lives: final time (default) or initial time.
enum class DataPlacement { forward_backward, both_initial };

struct Scenario {
  std::string name;
  GridDomain grid;
  Expression mu = Expression::constant(1.0);
  Expression lambda = Expression::constant(1.0);
  Expression source = Expression::constant(0.0);
  Expression dirichlet = Expression::constant(0.0);
  Expression data_plus = Expression::constant(0.0);
  Expression data_minus = Expression::constant(0.0);
  std::optional<Expression> exact;
  DataPlacement placement = DataPlacement::forward_backward;
  double zero_tol = 0.0;
  double tolerance = 1e-10;
  int max_refinements = 4;

  WeightField mu_field() const;
  WeightField lambda_field() const;
  // Same scenario on a grid with half the cell size; time step quartered if diffusive.
  Scenario refined(bool diffusive_time = true) const;

  bool operator==(const Scenario&) const = default;
};

struct SolveReport {
  double residual = 0.0;  // max_i |r_i| / |A_ii|
  int system_size = 0;
  long long nonzeros = 0;
  int iterations = 0;     // refinement sweeps after the first solve
  std::vector<double> slice_energy;  // 1/2 sum lambda |Du|^2 per level
};

struct SparseSystem {
  int size = 0;
  std::vector<int> rows, cols;
  std::vector<double> vals;
  std::vector<double> rhs;
  std::vector<int> unknown;  // level * ncells + cell -> unknown index, -1 if data
  SpaceTimeField known;      // imposed data
};

SparseSystem assemble(const Scenario& s);

struct Solution {
  SpaceTimeField u;
  SolveReport report;
};

Solution solve(const Scenario& s);

double slice_energy(const SpaceTimeField& u, const WeightField& lambda, int level);

// Space-time bump bank inside the domain, away from every boundary.
std::vector<SpaceTimeField> bump_bank(const GridDomain& grid, int count, double amplitude,
                                      unsigned seed);

struct QminResult {
  double q = 0.0;
  int used = 0;
  int skipped = 0;
  int witness = -1;
};

QminResult qmin_ratio(const SpaceTimeField& u, const Scenario& s,
                      const std::vector<SpaceTimeField>& bank);

bool structure_condition_check(const GradientField& a, const std::vector<double>& b,
                               const GradientField& du, const WeightField& lambda, double L,
                               double M, double tol = 1e-12);

// Columns t,x[,y],u[,exact,error]; rows level-major then cell order.
void write_solution_csv(std::ostream& out, const SpaceTimeField& u,
                        const std::optional<Expression>& exact = std::nullopt);
// Text header line then row-major little-endian doubles indexed [level][row][col].
void write_solution_binary(std::ostream& out, const SpaceTimeField& u);
SpaceTimeField read_solution_binary(std::istream& in);

}  // namespace mixlab
