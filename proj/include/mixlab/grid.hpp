#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace mixlab {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

double distance(const Point& a, const Point& b);

// Uniform cell-centred grid on a box in R^1 or R^2, times t_n = n*dt, n = 0..time_steps.
class GridDomain {
 public:
  GridDomain() = default;
  GridDomain(int dim, std::array<int, 2> cells, std::array<double, 2> origin,
             std::array<double, 2> extent, int time_steps, double dt);

  static GridDomain line(int nx, double x0, double x1, int time_steps = 1, double dt = 1.0);
  static GridDomain square(int nx, int ny, double x0, double x1, double y0, double y1,
                           int time_steps = 1, double dt = 1.0);

  int dim() const { return dim_; }
  int nx() const { return cells_[0]; }
  int ny() const { return dim_ == 2 ? cells_[1] : 1; }
  int num_cells() const { return nx() * ny(); }
  double cell_size(int axis) const { return h_[axis]; }
  double cell_volume() const { return dim_ == 2 ? h_[0] * h_[1] : h_[0]; }
  std::array<double, 2> origin() const { return origin_; }
  std::array<double, 2> extent() const { return extent_; }

  int time_steps() const { return steps_; }
  int num_levels() const { return steps_ + 1; }
  double dt() const { return dt_; }
  double time(int n) const { return n * dt_; }
  double final_time() const { return steps_ * dt_; }

  int index(int i, int j) const { return j * cells_[0] + i; }
  int col(int c) const { return c % cells_[0]; }
  int row(int c) const { return c / cells_[0]; }
  Point center(int c) const;
  // Lower and upper corners of a cell.
  std::array<double, 4> cell_box(int c) const;

  // Face neighbours; -1 marks a boundary face.  Order: -x, +x, -y, +y.
  std::array<int, 4> neighbors(int c) const;

  // Cells with centre within distance r (closed) of p, clipped to the grid.
  std::vector<int> ball_cells(const Point& p, double r) const;
  // Whether the closed ball sits inside the closed box, up to a relative slack.
  bool contains_ball(const Point& p, double r) const;
  bool contains_point(const Point& p) const;

  int nearest_cell(const Point& p) const;
  int nearest_level(double t) const;
  // Levels n with a <= t_n <= b, after rounding a up and b down.
  std::pair<int, int> level_window(double a, double b) const;

  // Quadrature weights over the levels in [a, b]: trapezoid, rescaled to sum to b - a.
  struct TimeWindow {
    int n0 = 0;
    int n1 = -1;
    std::vector<double> weights;
  };
  TimeWindow quadrature_window(double a, double b) const;

  // Refined copy: space and time step halved (time quartered if diffusive).
  GridDomain refined(bool diffusive_time) const;

  bool operator==(const GridDomain&) const = default;

 private:
  int dim_ = 1;
  std::array<int, 2> cells_{1, 1};
  std::array<double, 2> origin_{0.0, 0.0};
  std::array<double, 2> extent_{1.0, 1.0};
  std::array<double, 2> h_{1.0, 1.0};
  int steps_ = 1;
  double dt_ = 1.0;
};

// Space-time samples u[level * num_cells + cell].
class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(const GridDomain& grid, double fill = 0.0);

  const GridDomain& grid() const { return grid_; }
  double& operator()(int cell, int level) { return values_[index(cell, level)]; }
  double operator()(int cell, int level) const { return values_[index(cell, level)]; }
  const double* slice(int level) const { return values_.data() + index(0, level); }
  double* slice(int level) { return values_.data() + index(0, level); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  SpaceTimeField scaled(double s) const;
  SpaceTimeField shifted(double s) const;
  double min() const;
  double max() const;

 private:
  std::size_t index(int cell, int level) const {
    return static_cast<std::size_t>(level) * grid_.num_cells() + cell;
  }
  GridDomain grid_;
  std::vector<double> values_;
};

}  // namespace mixlab
