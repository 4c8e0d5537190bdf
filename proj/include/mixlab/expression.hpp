#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "mixlab/grid.hpp"

namespace mixlab {

// Closed-form field from a fixed catalog, optionally time dependent.
// Kinds: const, power, sgn_x, sgn_xy, cusp_n, cusp_exp, osc_interface, piecewise,
// sin_pi, gauss, linear, linear_switch, csv.
struct Expression {
  std::string kind = "const";
  std::map<std::string, double> params;
  std::string path;

  // Filled for kind csv.
  int csv_nx = 0;
  int csv_ny = 0;
  std::vector<double> csv_values;
  std::array<double, 4> csv_box{0.0, 0.0, 1.0, 1.0};

  double param(const std::string& key, double fallback) const;
  double eval(const Point& p, double t = 0.0) const;

  static Expression constant(double v);
  static bool known_kind(const std::string& kind);
  static std::vector<std::string> known_params(const std::string& kind);

  bool operator==(const Expression&) const = default;
};

// Averages over an axis box of the positive part, negative part and the zero indicator.
struct CellParts {
  double positive = 0.0;
  double negative = 0.0;
  double zero_fraction = 0.0;
};

CellParts cell_parts(const Expression& e, const std::array<double, 4>& box, int dim,
                     double zero_tol);

// Reads a CSV grid: header "nx,ny" then nx*ny row-major values.
void load_csv(Expression& e, const std::string& path, const GridDomain& grid);

std::vector<double> sample(const Expression& e, const GridDomain& grid, double t = 0.0);

}  // namespace mixlab
