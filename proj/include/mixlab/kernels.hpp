#pragma once

#include <vector>

#include "mixlab/grid.hpp"

namespace mixlab {

struct Ball {
  Point center;
  double radius = 0.0;
};

// w = (u-k)_+ for sign +1, (u-k)_- for sign -1, |u-k| for sign 0.
struct Truncation {
  double level = 0.0;
  int sign = 0;
  double apply(double u) const {
    const double d = u - level;
    if (sign > 0) return d > 0.0 ? d : 0.0;
    if (sign < 0) return d < 0.0 ? -d : 0.0;
    return d < 0.0 ? -d : d;
  }
};

// Forward-difference gradient of a cell field, one-sided backward at the last cell.
void forward_gradient(const GridDomain& grid, const double* w, int c, double& gx, double& gy);

struct GradientField {
  std::vector<double> gx, gy;
  double norm(int c) const;
};

GradientField gradient(const GridDomain& grid, const double* values);
inline GradientField gradient(const GridDomain& grid, const std::vector<double>& values) {
  return gradient(grid, values.data());
}

namespace kernels {

// out[b * k + j] = sum over cells of ball b of integrands[j] times the cell volume.
// Balls are processed in parallel; each sum runs in a fixed order.
std::vector<double> ball_integrals(const GridDomain& grid, const std::vector<Ball>& balls,
                                   const std::vector<const std::vector<double>*>& integrands);

// Per level n in [n0, n1]: sum over cells of weight[c] * T(u)^exponent * volume.
// A null weight means 1.
std::vector<double> slice_sums(const SpaceTimeField& u, const std::vector<int>& cells,
                               const std::vector<double>* weight, int n0, int n1,
                               const Truncation& t, double exponent = 2.0);

// Per level: sum over cells of weight[c] * |D T(u)|^2 * volume.
std::vector<double> slice_gradient_energy(const SpaceTimeField& u, const std::vector<int>& cells,
                                          const std::vector<double>* weight, int n0, int n1,
                                          const Truncation& t);

// Per level max over cells of T(u); -inf for an empty set.
std::vector<double> slice_max(const SpaceTimeField& u, const std::vector<int>& cells, int n0,
                              int n1, const Truncation& t);

}  // namespace kernels

// Straight loops with the same arithmetic order, kept as a reference for the kernels.
namespace serial {

std::vector<double> ball_integrals(const GridDomain& grid, const std::vector<Ball>& balls,
                                   const std::vector<const std::vector<double>*>& integrands);
std::vector<double> slice_sums(const SpaceTimeField& u, const std::vector<int>& cells,
                               const std::vector<double>* weight, int n0, int n1,
                               const Truncation& t, double exponent = 2.0);
std::vector<double> slice_gradient_energy(const SpaceTimeField& u, const std::vector<int>& cells,
                                          const std::vector<double>* weight, int n0, int n1,
                                          const Truncation& t);
std::vector<double> slice_max(const SpaceTimeField& u, const std::vector<int>& cells, int n0,
                              int n1, const Truncation& t);

}  // namespace serial

}  // namespace mixlab
