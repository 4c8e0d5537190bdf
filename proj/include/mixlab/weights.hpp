#pragma once

#include <vector>

#include "mixlab/expression.hpp"
#include "mixlab/grid.hpp"

namespace mixlab {

enum class WeightKind { mu, lambda, mu_lambda_abs, derived };

// Cell-sampled weight.  The positive/negative parts and the zero fraction are cell
// averages; for plain samples they follow from the centre value.
class WeightField {
 public:
  WeightField() = default;
  WeightField(const GridDomain& grid, std::vector<double> values, WeightKind kind,
              double zero_tol = 0.0);
  static WeightField from_expression(const GridDomain& grid, const Expression& e, WeightKind kind,
                                     double zero_tol = 0.0);
  static WeightField constant(const GridDomain& grid, double v, WeightKind kind);

  const GridDomain& grid() const { return grid_; }
  WeightKind kind() const { return kind_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int c) const { return values_[c]; }
  int size() const { return static_cast<int>(values_.size()); }

  const std::vector<double>& positive_part() const { return positive_; }
  const std::vector<double>& negative_part() const { return negative_; }
  const std::vector<double>& zero_fraction() const { return zero_fraction_; }

  // Sum of value * cell volume over the cells.
  double measure(const std::vector<int>& cells) const;

 private:
  GridDomain grid_;
  std::vector<double> values_;
  std::vector<double> positive_;
  std::vector<double> negative_;
  std::vector<double> zero_fraction_;
  WeightKind kind_ = WeightKind::derived;
};

enum class Label : signed char { minus = -1, zero = 0, plus = 1 };

struct SignPartition {
  GridDomain grid;
  std::vector<Label> labels;
  std::vector<int> plus_cells, minus_cells, zero_cells;
  std::vector<int> interface_cells;  // I
  std::vector<int> interface_plus, interface_minus, interface_zero;
  std::vector<char> in_interface, in_plus_interface, in_minus_interface, in_zero_interface;
  int plus_components = 0, minus_components = 0, zero_components = 0;

  Label label(int c) const { return labels[c]; }
  // Cells of the set lying in Omega_s union I_s.
  bool in_closure(int c, Label s) const;
  // Cells with centre strictly closer than eps to a centre of A (A itself when eps <= 0).
  std::vector<int> eps_neighborhood(const std::vector<int>& cells, double eps) const;
  // Faces separating differently labelled cells, by midpoint.
  std::vector<Point> interface_faces() const;
};

SignPartition partition_and_interface(const WeightField& mu, double zero_tol = 0.0);

int count_components(const GridDomain& grid, const std::vector<char>& mask);

}  // namespace mixlab
