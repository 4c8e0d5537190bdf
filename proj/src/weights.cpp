#include "mixlab/weights.hpp"

#include <algorithm>
#include <cmath>

#include "mixlab/error.hpp"

namespace mixlab {

WeightField::WeightField(const GridDomain& grid, std::vector<double> values, WeightKind kind,
                         double zero_tol)
    : grid_(grid), values_(std::move(values)), kind_(kind) {
  if (static_cast<int>(values_.size()) != grid.num_cells())
    throw Error(ErrorKind::InvalidInput, "weight size does not match grid");
  if (kind == WeightKind::lambda || kind == WeightKind::mu_lambda_abs) {
    for (double v : values_)
      if (!(v > 0.0))
        throw Error(kind == WeightKind::lambda ? ErrorKind::NonPositiveLambda
                                               : ErrorKind::NonPositiveWeight,
                    "weight must be strictly positive");
  }
  positive_.resize(values_.size());
  negative_.resize(values_.size());
  zero_fraction_.resize(values_.size());
  for (std::size_t c = 0; c < values_.size(); ++c) {
    positive_[c] = std::max(values_[c], 0.0);
    negative_[c] = std::max(-values_[c], 0.0);
    zero_fraction_[c] = std::abs(values_[c]) <= zero_tol ? 1.0 : 0.0;
  }
}

WeightField WeightField::from_expression(const GridDomain& grid, const Expression& e,
                                         WeightKind kind, double zero_tol) {
  WeightField w(grid, sample(e, grid), kind, zero_tol);
  if (kind == WeightKind::mu) {
    for (int c = 0; c < grid.num_cells(); ++c) {
      const CellParts parts = cell_parts(e, grid.cell_box(c), grid.dim(), zero_tol);
      w.positive_[c] = parts.positive;
      w.negative_[c] = parts.negative;
      w.zero_fraction_[c] = parts.zero_fraction;
    }
  }
  return w;
}

WeightField WeightField::constant(const GridDomain& grid, double v, WeightKind kind) {
  return WeightField(grid, std::vector<double>(grid.num_cells(), v), kind);
}

double WeightField::measure(const std::vector<int>& cells) const {
  double s = 0.0;
  for (int c : cells) s += values_[c];
  return s * grid_.cell_volume();
}

bool SignPartition::in_closure(int c, Label s) const {
  if (labels[c] == s) return true;
  switch (s) {
    case Label::plus: return in_plus_interface[c] != 0;
    case Label::minus: return in_minus_interface[c] != 0;
    case Label::zero: return in_zero_interface[c] != 0;
  }
  return false;
}

std::vector<int> SignPartition::eps_neighborhood(const std::vector<int>& cells, double eps) const {
  if (eps <= 0.0 || cells.empty()) {
    std::vector<int> out = cells;
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<char> mark(grid.num_cells(), 0);
  const double r = eps * (1.0 - 1e-9);
  for (int c : cells)
    for (int d : grid.ball_cells(grid.center(c), r)) mark[d] = 1;
  for (int c : cells) mark[c] = 1;
  std::vector<int> out;
  for (int c = 0; c < grid.num_cells(); ++c)
    if (mark[c]) out.push_back(c);
  return out;
}

std::vector<Point> SignPartition::interface_faces() const {
  std::vector<Point> faces;
  for (int c = 0; c < grid.num_cells(); ++c) {
    const auto nb = grid.neighbors(c);
    for (int k : {1, 3}) {
      const int d = nb[k];
      if (d < 0 || labels[d] == labels[c]) continue;
      const Point a = grid.center(c), b = grid.center(d);
      faces.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
    }
  }
  return faces;
}

int count_components(const GridDomain& grid, const std::vector<char>& mask) {
  std::vector<char> seen(mask.size(), 0);
  std::vector<int> stack;
  int count = 0;
  for (int c = 0; c < grid.num_cells(); ++c) {
    if (!mask[c] || seen[c]) continue;
    ++count;
    seen[c] = 1;
    stack.push_back(c);
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b : grid.neighbors(a)) {
        if (b >= 0 && mask[b] && !seen[b]) {
          seen[b] = 1;
          stack.push_back(b);
        }
      }
    }
  }
  return count;
}

SignPartition partition_and_interface(const WeightField& mu, double zero_tol) {
  if (zero_tol < 0.0) throw Error(ErrorKind::InvalidInput, "zero_tol must be nonnegative");
  SignPartition part;
  part.grid = mu.grid();
  const GridDomain& g = part.grid;
  const int n = g.num_cells();
  part.labels.resize(n);
  for (int c = 0; c < n; ++c) {
    const double v = mu[c];
    part.labels[c] = std::abs(v) <= zero_tol ? Label::zero : (v > 0.0 ? Label::plus : Label::minus);
    (v > zero_tol ? part.plus_cells : v < -zero_tol ? part.minus_cells : part.zero_cells).push_back(c);
  }
  part.in_interface.assign(n, 0);
  part.in_plus_interface.assign(n, 0);
  part.in_minus_interface.assign(n, 0);
  part.in_zero_interface.assign(n, 0);
  auto mark = [&](int c, Label s) {
    part.in_interface[c] = 1;
    if (s == Label::plus) part.in_plus_interface[c] = 1;
    if (s == Label::minus) part.in_minus_interface[c] = 1;
    if (s == Label::zero) part.in_zero_interface[c] = 1;
  };
  for (int c = 0; c < n; ++c) {
    for (int d : g.neighbors(c)) {
      if (d < 0 || part.labels[d] == part.labels[c]) continue;
      // Both cells straddle the boundary of each of the two regions.
      mark(c, part.labels[c]);
      mark(c, part.labels[d]);
    }
  }
  for (int c = 0; c < n; ++c) {
    if (part.in_interface[c]) part.interface_cells.push_back(c);
    if (part.in_plus_interface[c]) part.interface_plus.push_back(c);
    if (part.in_minus_interface[c]) part.interface_minus.push_back(c);
    if (part.in_zero_interface[c]) part.interface_zero.push_back(c);
  }
  auto components = [&](Label s) {
    std::vector<char> m(n, 0);
    for (int c = 0; c < n; ++c) m[c] = part.labels[c] == s;
    return count_components(g, m);
  };
  part.plus_components = components(Label::plus);
  part.minus_components = components(Label::minus);
  part.zero_components = components(Label::zero);
  return part;
}

}  // namespace mixlab
