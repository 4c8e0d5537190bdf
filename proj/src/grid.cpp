#include "mixlab/grid.hpp"

#include <algorithm>
#include <cmath>

#include "mixlab/error.hpp"

namespace mixlab {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

GridDomain::GridDomain(int dim, std::array<int, 2> cells, std::array<double, 2> origin,
                       std::array<double, 2> extent, int time_steps, double dt)
    : dim_(dim), cells_(cells), origin_(origin), extent_(extent), steps_(time_steps), dt_(dt) {
  if (dim != 1 && dim != 2) throw Error(ErrorKind::InvalidInput, "grid dimension must be 1 or 2");
  if (dim == 1) {
    cells_[1] = 1;
    extent_[1] = 1.0;
  }
  for (int a = 0; a < dim; ++a) {
    if (cells_[a] < 1) throw Error(ErrorKind::InvalidInput, "grid needs at least one cell per axis");
    if (!(extent_[a] > 0.0)) throw Error(ErrorKind::InvalidInput, "grid extent must be positive");
    h_[a] = extent_[a] / cells_[a];
  }
  if (dim == 1) h_[1] = 1.0;
  if (time_steps < 1) throw Error(ErrorKind::InvalidInput, "need at least one time step");
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidInput, "dt must be positive");
}

GridDomain GridDomain::line(int nx, double x0, double x1, int time_steps, double dt) {
  return GridDomain(1, {nx, 1}, {x0, 0.0}, {x1 - x0, 1.0}, time_steps, dt);
}

GridDomain GridDomain::square(int nx, int ny, double x0, double x1, double y0, double y1,
                              int time_steps, double dt) {
  return GridDomain(2, {nx, ny}, {x0, y0}, {x1 - x0, y1 - y0}, time_steps, dt);
}

Point GridDomain::center(int c) const {
  Point p;
  p.x = origin_[0] + (col(c) + 0.5) * h_[0];
  p.y = dim_ == 2 ? origin_[1] + (row(c) + 0.5) * h_[1] : 0.0;
  return p;
}

std::array<double, 4> GridDomain::cell_box(int c) const {
  const double x0 = origin_[0] + col(c) * h_[0];
  const double y0 = dim_ == 2 ? origin_[1] + row(c) * h_[1] : 0.0;
  return {x0, y0, x0 + h_[0], dim_ == 2 ? y0 + h_[1] : 0.0};
}

std::array<int, 4> GridDomain::neighbors(int c) const {
  const int i = col(c);
  const int j = row(c);
  std::array<int, 4> nb{-1, -1, -1, -1};
  if (i > 0) nb[0] = c - 1;
  if (i + 1 < cells_[0]) nb[1] = c + 1;
  if (dim_ == 2) {
    if (j > 0) nb[2] = c - cells_[0];
    if (j + 1 < cells_[1]) nb[3] = c + cells_[0];
  }
  return nb;
}

std::vector<int> GridDomain::ball_cells(const Point& p, double r) const {
  std::vector<int> out;
  if (r < 0.0) return out;
  const double r2 = r * r * (1.0 + 1e-12);
  auto lo = [&](int a, double v) {
    return std::max(0, static_cast<int>(std::floor((v - origin_[a]) / h_[a] - 0.5)));
  };
  auto hi = [&](int a, double v) {
    return std::min(cells_[a] - 1, static_cast<int>(std::ceil((v - origin_[a]) / h_[a] - 0.5)));
  };
  const int i0 = lo(0, p.x - r), i1 = hi(0, p.x + r);
  int j0 = 0, j1 = 0;
  if (dim_ == 2) {
    j0 = lo(1, p.y - r);
    j1 = hi(1, p.y + r);
  }
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const int c = index(i, j);
      const Point q = center(c);
      const double dx = q.x - p.x;
      const double dy = dim_ == 2 ? q.y - p.y : 0.0;
      if (dx * dx + dy * dy <= r2) out.push_back(c);
    }
  }
  return out;
}

bool GridDomain::contains_ball(const Point& p, double r) const {
  const double slack = 1e-9 * std::max(extent_[0], extent_[1]);
  if (p.x - r < origin_[0] - slack || p.x + r > origin_[0] + extent_[0] + slack) return false;
  if (dim_ == 2 && (p.y - r < origin_[1] - slack || p.y + r > origin_[1] + extent_[1] + slack))
    return false;
  return true;
}

bool GridDomain::contains_point(const Point& p) const { return contains_ball(p, 0.0); }

int GridDomain::nearest_cell(const Point& p) const {
  auto axis = [&](int a, double v) {
    int i = static_cast<int>(std::floor((v - origin_[a]) / h_[a]));
    return std::clamp(i, 0, cells_[a] - 1);
  };
  return index(axis(0, p.x), dim_ == 2 ? axis(1, p.y) : 0);
}

int GridDomain::nearest_level(double t) const {
  return std::clamp(static_cast<int>(std::lround(t / dt_)), 0, steps_);
}

std::pair<int, int> GridDomain::level_window(double a, double b) const {
  const double tol = 1e-9;
  int n0 = static_cast<int>(std::ceil(a / dt_ - tol));
  int n1 = static_cast<int>(std::floor(b / dt_ + tol));
  return {std::max(n0, 0), std::min(n1, steps_)};
}

GridDomain::TimeWindow GridDomain::quadrature_window(double a, double b) const {
  TimeWindow w;
  if (!(b > a)) return w;
  const auto [n0, n1] = level_window(a, b);
  w.n0 = n0;
  w.n1 = n1;
  if (n1 < n0) return w;
  w.weights.assign(n1 - n0 + 1, 0.0);
  if (n1 == n0) {
    w.weights[0] = b - a;
    return w;
  }
  for (int n = n0; n < n1; ++n) {
    w.weights[n - n0] += 0.5 * dt_;
    w.weights[n - n0 + 1] += 0.5 * dt_;
  }
  const double scale = (b - a) / ((n1 - n0) * dt_);
  for (double& x : w.weights) x *= scale;
  return w;
}

GridDomain GridDomain::refined(bool diffusive_time) const {
  std::array<int, 2> cells{cells_[0] * 2, dim_ == 2 ? cells_[1] * 2 : 1};
  const int factor = diffusive_time ? 4 : 2;
  return GridDomain(dim_, cells, origin_, extent_, steps_ * factor, dt_ / factor);
}

SpaceTimeField::SpaceTimeField(const GridDomain& grid, double fill)
    : grid_(grid),
      values_(static_cast<std::size_t>(grid.num_cells()) * grid.num_levels(), fill) {}

SpaceTimeField SpaceTimeField::scaled(double s) const {
  SpaceTimeField out = *this;
  for (double& v : out.values_) v *= s;
  return out;
}

SpaceTimeField SpaceTimeField::shifted(double s) const {
  SpaceTimeField out = *this;
  for (double& v : out.values_) v += s;
  return out;
}

double SpaceTimeField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double SpaceTimeField::max() const { return *std::max_element(values_.begin(), values_.end()); }

}  // namespace mixlab
