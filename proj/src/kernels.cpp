#include "mixlab/kernels.hpp"

#include <cmath>
#include <limits>

namespace mixlab {

void forward_gradient(const GridDomain& grid, const double* w, int c, double& gx, double& gy) {
  const auto nb = grid.neighbors(c);
  gx = nb[1] >= 0 ? (w[nb[1]] - w[c]) / grid.cell_size(0)
                  : (nb[0] >= 0 ? (w[c] - w[nb[0]]) / grid.cell_size(0) : 0.0);
  gy = 0.0;
  if (grid.dim() == 2)
    gy = nb[3] >= 0 ? (w[nb[3]] - w[c]) / grid.cell_size(1)
                    : (nb[2] >= 0 ? (w[c] - w[nb[2]]) / grid.cell_size(1) : 0.0);
}

namespace {

double power(double v, double e) { return e == 2.0 ? v * v : (e == 1.0 ? v : std::pow(v, e)); }

std::vector<double> one_ball(const GridDomain& grid, const Ball& ball,
                             const std::vector<const std::vector<double>*>& integrands) {
  std::vector<double> s(integrands.size(), 0.0);
  for (int c : grid.ball_cells(ball.center, ball.radius))
    for (std::size_t j = 0; j < integrands.size(); ++j) s[j] += (*integrands[j])[c];
  for (double& v : s) v *= grid.cell_volume();
  return s;
}

double one_slice_sum(const SpaceTimeField& u, const std::vector<int>& cells,
                     const std::vector<double>* weight, int n, const Truncation& t,
                     double exponent) {
  const double* un = u.slice(n);
  double s = 0.0;
  for (int c : cells) {
    const double w = t.apply(un[c]);
    if (w == 0.0) continue;
    s += (weight ? (*weight)[c] : 1.0) * power(w, exponent);
  }
  return s * u.grid().cell_volume();
}

double one_slice_gradient(const SpaceTimeField& u, const std::vector<int>& cells,
                          const std::vector<double>* weight, int n, const Truncation& t,
                          std::vector<double>& work) {
  const GridDomain& g = u.grid();
  const double* un = u.slice(n);
  work.resize(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) work[c] = t.apply(un[c]);
  double s = 0.0;
  for (int c : cells) {
    double gx, gy;
    forward_gradient(g, work.data(), c, gx, gy);
    s += (weight ? (*weight)[c] : 1.0) * (gx * gx + gy * gy);
  }
  return s * g.cell_volume();
}

double one_slice_max(const SpaceTimeField& u, const std::vector<int>& cells, int n,
                     const Truncation& t) {
  const double* un = u.slice(n);
  double m = -std::numeric_limits<double>::infinity();
  for (int c : cells) m = std::max(m, t.apply(un[c]));
  return m;
}

}  // namespace

double GradientField::norm(int c) const { return std::hypot(gx[c], gy[c]); }

GradientField gradient(const GridDomain& grid, const double* values) {
  GradientField g;
  g.gx.resize(grid.num_cells());
  g.gy.resize(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c) forward_gradient(grid, values, c, g.gx[c], g.gy[c]);
  return g;
}

namespace kernels {

std::vector<double> ball_integrals(const GridDomain& grid, const std::vector<Ball>& balls,
                                   const std::vector<const std::vector<double>*>& integrands) {
  const std::size_t k = integrands.size();
  std::vector<double> out(balls.size() * k, 0.0);
  const long nb = static_cast<long>(balls.size());
#pragma omp parallel for schedule(dynamic, 4) if (nb > 8)
  for (long b = 0; b < nb; ++b) {
    const auto s = one_ball(grid, balls[b], integrands);
    for (std::size_t j = 0; j < k; ++j) out[b * k + j] = s[j];
  }
  return out;
}

std::vector<double> slice_sums(const SpaceTimeField& u, const std::vector<int>& cells,
                               const std::vector<double>* weight, int n0, int n1,
                               const Truncation& t, double exponent) {
  const int m = std::max(0, n1 - n0 + 1);
  std::vector<double> out(m, 0.0);
#pragma omp parallel for schedule(static) if (m * cells.size() > 20000)
  for (int i = 0; i < m; ++i) out[i] = one_slice_sum(u, cells, weight, n0 + i, t, exponent);
  return out;
}

std::vector<double> slice_gradient_energy(const SpaceTimeField& u, const std::vector<int>& cells,
                                          const std::vector<double>* weight, int n0, int n1,
                                          const Truncation& t) {
  const int m = std::max(0, n1 - n0 + 1);
  std::vector<double> out(m, 0.0);
#pragma omp parallel if (m * cells.size() > 20000)
  {
    std::vector<double> work;
#pragma omp for schedule(static)
    for (int i = 0; i < m; ++i) out[i] = one_slice_gradient(u, cells, weight, n0 + i, t, work);
  }
  return out;
}

std::vector<double> slice_max(const SpaceTimeField& u, const std::vector<int>& cells, int n0,
                              int n1, const Truncation& t) {
  const int m = std::max(0, n1 - n0 + 1);
  std::vector<double> out(m, 0.0);
#pragma omp parallel for schedule(static) if (m * cells.size() > 20000)
  for (int i = 0; i < m; ++i) out[i] = one_slice_max(u, cells, n0 + i, t);
  return out;
}

}  // namespace kernels

namespace serial {

std::vector<double> ball_integrals(const GridDomain& grid, const std::vector<Ball>& balls,
                                   const std::vector<const std::vector<double>*>& integrands) {
  std::vector<double> out;
  out.reserve(balls.size() * integrands.size());
  for (const Ball& b : balls)
    for (double v : one_ball(grid, b, integrands)) out.push_back(v);
  return out;
}

std::vector<double> slice_sums(const SpaceTimeField& u, const std::vector<int>& cells,
                               const std::vector<double>* weight, int n0, int n1,
                               const Truncation& t, double exponent) {
  std::vector<double> out;
  for (int n = n0; n <= n1; ++n) out.push_back(one_slice_sum(u, cells, weight, n, t, exponent));
  return out;
}

std::vector<double> slice_gradient_energy(const SpaceTimeField& u, const std::vector<int>& cells,
                                          const std::vector<double>* weight, int n0, int n1,
                                          const Truncation& t) {
  std::vector<double> out, work;
  for (int n = n0; n <= n1; ++n) out.push_back(one_slice_gradient(u, cells, weight, n, t, work));
  return out;
}

std::vector<double> slice_max(const SpaceTimeField& u, const std::vector<int>& cells, int n0,
                              int n1, const Truncation& t) {
  std::vector<double> out;
  for (int n = n0; n <= n1; ++n) out.push_back(one_slice_max(u, cells, n, t));
  return out;
}

}  // namespace serial

}  // namespace mixlab
