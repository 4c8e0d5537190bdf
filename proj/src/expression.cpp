#include "mixlab/expression.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mixlab/error.hpp"

namespace mixlab {

namespace {

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

// Half width of the cusp {x > 0, |y| < g(x)}.
double cusp_width(const Expression& e, double x) {
  if (x <= 0.0) return 0.0;
  if (x > e.param("length", 1e300)) return 0.0;
  if (e.kind == "cusp_n") return std::pow(x, e.param("n", 3.0));
  return std::exp(-1.0 / x);
}

bool is_cusp(const Expression& e) { return e.kind == "cusp_n" || e.kind == "cusp_exp"; }

}  // namespace

double Expression::param(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Expression Expression::constant(double v) {
  Expression e;
  e.kind = "const";
  e.params["value"] = v;
  return e;
}

std::vector<std::string> Expression::known_params(const std::string& kind) {
  if (kind == "const") return {"value"};
  if (kind == "power") return {"a", "b", "beta", "scale"};
  if (kind == "sgn_x") return {"a", "scale"};
  if (kind == "sgn_xy") return {"a", "b", "scale"};
  if (kind == "cusp_n") return {"n", "inside", "outside", "length"};
  if (kind == "cusp_exp") return {"inside", "outside", "length"};
  if (kind == "osc_interface") return {"scale"};
  if (kind == "piecewise") return {"axis", "at", "left", "right"};
  if (kind == "sin_pi") return {"amp", "x0", "lx", "y0", "ly", "decay"};
  if (kind == "gauss") return {"base", "amp", "cx", "cy", "width"};
  if (kind == "linear") return {"a", "bx", "by", "bt"};
  if (kind == "linear_switch") return {"a", "bx", "by", "t_switch", "factor"};
  if (kind == "csv") return {};
  return {};
}

bool Expression::known_kind(const std::string& kind) {
  static const std::vector<std::string> kinds{
      "const", "power", "sgn_x", "sgn_xy", "cusp_n", "cusp_exp", "osc_interface",
      "piecewise", "sin_pi", "gauss", "linear", "linear_switch", "csv"};
  return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

double Expression::eval(const Point& p, double t) const {
  if (kind == "const") return param("value", 0.0);
  if (kind == "power") {
    const double r = std::hypot(p.x - param("a", 0.0), p.y - param("b", 0.0));
    return param("scale", 1.0) * std::pow(r, param("beta", 1.0));
  }
  if (kind == "sgn_x") return param("scale", 1.0) * sgn(p.x - param("a", 0.0));
  if (kind == "sgn_xy")
    return param("scale", 1.0) * sgn((p.x - param("a", 0.0)) * (p.y - param("b", 0.0)));
  if (is_cusp(*this)) {
    const bool in = std::abs(p.y) < cusp_width(*this, p.x);
    return in ? param("inside", 1.0) : param("outside", -1.0);
  }
  if (kind == "osc_interface") {
    const double f = p.x == 0.0 ? 0.0 : p.x * std::cos(1.0 / p.x);
    return param("scale", 1.0) * sgn(p.y - f);
  }
  if (kind == "piecewise") {
    const double v = param("axis", 0.0) == 0.0 ? p.x : p.y;
    return v < param("at", 0.0) ? param("left", 0.0) : param("right", 0.0);
  }
  if (kind == "sin_pi") {
    const double pi = std::numbers::pi;
    double v = param("amp", 1.0) * std::sin(pi * (p.x - param("x0", 0.0)) / param("lx", 1.0));
    if (params.count("ly")) v *= std::sin(pi * (p.y - param("y0", 0.0)) / param("ly", 1.0));
    return v * std::exp(-param("decay", 0.0) * t);
  }
  if (kind == "gauss") {
    const double w = param("width", 0.1);
    const double r2 = std::pow(p.x - param("cx", 0.0), 2) + std::pow(p.y - param("cy", 0.0), 2);
    return param("base", 0.0) + param("amp", 1.0) * std::exp(-r2 / (2.0 * w * w));
  }
  if (kind == "linear")
    return param("a", 0.0) + param("bx", 0.0) * p.x + param("by", 0.0) * p.y +
           param("bt", 0.0) * t;
  if (kind == "linear_switch") {
    const double v = param("a", 0.0) + param("bx", 0.0) * p.x + param("by", 0.0) * p.y;
    return t < param("t_switch", 0.5) ? v : param("factor", -1.0) * v;
  }
  if (kind == "csv") {
    if (csv_values.empty()) throw Error(ErrorKind::ScenarioError, "csv expression not loaded");
    const int i = std::clamp(
        static_cast<int>(std::floor((p.x - csv_box[0]) / (csv_box[2] - csv_box[0]) * csv_nx)), 0,
        csv_nx - 1);
    const int j = csv_ny == 1 ? 0
                              : std::clamp(static_cast<int>(std::floor(
                                               (p.y - csv_box[1]) / (csv_box[3] - csv_box[1]) * csv_ny)),
                                           0, csv_ny - 1);
    return csv_values[static_cast<std::size_t>(j) * csv_nx + i];
  }
  throw Error(ErrorKind::ScenarioError, "unknown expression kind " + kind);
}

CellParts cell_parts(const Expression& e, const std::array<double, 4>& box, int dim,
                     double zero_tol) {
  CellParts out;
  if (is_cusp(e) && dim == 2) {
    // Area of the cusp inside the box, integrated along x with Gauss panels.
    const double x0 = std::max(box[0], 0.0), x1 = box[2];
    double inside = 0.0;
    if (x1 > x0) {
      auto clipped = [&](double x) {
        const double g = cusp_width(e, x);
        return std::max(0.0, std::min(box[3], g) - std::max(box[1], -g));
      };
      const int panels = 8;
      const double w = (x1 - x0) / panels;
      for (int k = 0; k < panels; ++k)
        inside += boost::math::quadrature::gauss<double, 20>::integrate(clipped, x0 + k * w,
                                                                       x0 + (k + 1) * w);
    }
    const double area = (box[2] - box[0]) * (box[3] - box[1]);
    const double fin = std::clamp(inside / area, 0.0, 1.0);
    const double vin = e.param("inside", 1.0), vout = e.param("outside", -1.0);
    out.positive = fin * std::max(vin, 0.0) + (1.0 - fin) * std::max(vout, 0.0);
    out.negative = fin * std::max(-vin, 0.0) + (1.0 - fin) * std::max(-vout, 0.0);
    out.zero_fraction = (std::abs(vin) <= zero_tol ? fin : 0.0) +
                        (std::abs(vout) <= zero_tol ? 1.0 - fin : 0.0);
    return out;
  }
  const int s = 8;
  const int sy = dim == 2 ? s : 1;
  for (int j = 0; j < sy; ++j) {
    for (int i = 0; i < s; ++i) {
      Point p{box[0] + (i + 0.5) / s * (box[2] - box[0]),
              dim == 2 ? box[1] + (j + 0.5) / sy * (box[3] - box[1]) : 0.0};
      const double v = e.eval(p);
      out.positive += std::max(v, 0.0);
      out.negative += std::max(-v, 0.0);
      if (std::abs(v) <= zero_tol) out.zero_fraction += 1.0;
    }
  }
  const double n = static_cast<double>(s * sy);
  out.positive /= n;
  out.negative /= n;
  out.zero_fraction /= n;
  return out;
}

void load_csv(Expression& e, const std::string& path, const GridDomain& grid) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ScenarioError, "cannot open csv " + path);
  std::vector<double> numbers;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double v;
    while (ss >> v) numbers.push_back(v);
  }
  if (numbers.size() < 2) throw Error(ErrorKind::ScenarioError, "csv grid lacks header");
  e.csv_nx = static_cast<int>(numbers[0]);
  e.csv_ny = static_cast<int>(numbers[1]);
  if (e.csv_nx < 1 || e.csv_ny < 1 ||
      numbers.size() != 2 + static_cast<std::size_t>(e.csv_nx) * e.csv_ny)
    throw Error(ErrorKind::ScenarioError, "csv grid size does not match header in " + path);
  e.csv_values.assign(numbers.begin() + 2, numbers.end());
  const auto o = grid.origin();
  const auto x = grid.extent();
  e.csv_box = {o[0], o[1], o[0] + x[0], o[1] + x[1]};
  e.path = path;
}

std::vector<double> sample(const Expression& e, const GridDomain& grid, double t) {
  std::vector<double> out(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c) out[c] = e.eval(grid.center(c), t);
  return out;
}

}  // namespace mixlab
