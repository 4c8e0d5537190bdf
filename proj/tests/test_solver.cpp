#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "mixlab/error.hpp"
#include "mixlab/solver.hpp"

using namespace mixlab;

namespace {

Expression expr(const std::string& kind, std::map<std::string, double> params) {
  Expression e;
  e.kind = kind;
  e.params = std::move(params);
  return e;
}

Scenario heat(int nx, double T, int steps) {
  Scenario s;
  s.grid = GridDomain::line(nx, 0.0, 1.0, steps, T / steps);
  s.data_plus = expr("sin_pi", {{"amp", 1.0}});
  s.exact = expr("sin_pi", {{"amp", 1.0}, {"decay", std::numbers::pi * std::numbers::pi}});
  return s;
}

double max_error(const Solution& sol, const Expression& exact) {
  const GridDomain& g = sol.u.grid();
  double e = 0.0;
  for (int n = 0; n < g.num_levels(); ++n)
    for (int c = 0; c < g.num_cells(); ++c)
      e = std::max(e, std::abs(sol.u(c, n) - exact.eval(g.center(c), g.time(n))));
  return e;
}

Scenario sgn_x(int nx, int steps) {
  Scenario s;
  s.grid = GridDomain::line(nx, -1.0, 1.0, steps, 0.25 / steps);
  s.mu = expr("sgn_x", {});
  s.data_plus = expr("sin_pi", {{"amp", 1.0}, {"x0", 0.0}, {"lx", 1.0}});
  s.data_minus = expr("gauss", {{"amp", 1.0}, {"cx", -0.5}, {"width", 0.2}});
  return s;
}

}  // namespace

TEST_CASE("heat: matches the analytic solution") {
  const Scenario s = heat(64, 0.0625, 256);
  const Solution sol = solve(s);
  CHECK(sol.report.residual <= 1e-10);
  CHECK(max_error(sol, *s.exact) < 2e-3);
  CHECK(sol.report.system_size == 64 * 256);
}

TEST_CASE("heat: second order under diffusive refinement") {
  Scenario s = heat(16, 0.0625, 16);
  std::vector<double> err;
  for (int k = 0; k < 4; ++k) {
    err.push_back(max_error(solve(s), *s.exact));
    s = s.refined(true);
  }
  for (int k = 0; k + 1 < 4; ++k) {
    const double ratio = err[k] / err[k + 1];
    CHECK(ratio >= 3.2);
    CHECK(ratio <= 4.8);
  }
}

TEST_CASE("elliptic: discrete harmonic slices") {
  Scenario s;
  s.grid = GridDomain::line(20, 0.0, 1.0, 5, 0.1);
  s.mu = Expression::constant(0.0);
  s.dirichlet = expr("linear", {{"bx", 1.0}});
  const Solution sol = solve(s);
  for (int n = 0; n < s.grid.num_levels(); ++n)
    for (int c = 0; c < s.grid.num_cells(); ++c) CHECK(sol.u(c, n) == doctest::Approx(s.grid.center(c).x).epsilon(1e-12));

  Scenario sq;
  sq.grid = GridDomain::square(8, 8, 0.0, 1.0, 0.0, 1.0, 2, 0.1);
  sq.mu = Expression::constant(0.0);
  sq.dirichlet = expr("linear", {{"a", 1.0}, {"bx", 1.0}, {"by", -2.0}});
  const Solution s2 = solve(sq);
  for (int c = 0; c < sq.grid.num_cells(); ++c) {
    const Point p = sq.grid.center(c);
    CHECK(s2.u(c, 1) == doctest::Approx(1.0 + p.x - 2.0 * p.y).epsilon(1e-11));
  }
}

TEST_CASE("sgn(x): forward-backward system is solvable") {
  const Scenario s = sgn_x(64, 32);
  const Solution sol = solve(s);
  CHECK(sol.report.residual <= 1e-10);
  const GridDomain& g = s.grid;
  for (int c = 0; c < g.num_cells(); ++c) {
    const Point x = g.center(c);
    if (x.x > 0) CHECK(sol.u(c, 0) == s.data_plus.eval(x, 0.0));
    if (x.x < 0) CHECK(sol.u(c, g.time_steps()) == s.data_minus.eval(x, g.final_time()));
  }
  // Nonnegative data and source give a nonnegative solution.
  CHECK(sol.u.min() >= -1e-14);
}

TEST_CASE("time reversal is exact at the linear-algebra level") {
  const Scenario s = sgn_x(40, 20);
  Scenario r = s;
  r.mu = expr("sgn_x", {{"scale", -1.0}});
  r.data_plus = s.data_minus;
  r.data_minus = s.data_plus;
  const Solution a = solve(s), b = solve(r);
  const int N = s.grid.time_steps();
  double worst = 0.0;
  for (int n = 0; n <= N; ++n)
    for (int c = 0; c < s.grid.num_cells(); ++c) worst = std::max(worst, std::abs(a.u(c, n) - b.u(c, N - n)));
  CHECK(worst <= 1e-13);
}

TEST_CASE("discrete maximum principle on a forward scenario") {
  Scenario s;
  s.grid = GridDomain::square(16, 16, -1, 1, -1, 1, 10, 0.01);
  s.lambda = expr("power", {{"beta", 0.5}, {"scale", 1.0}});
  s.data_plus = expr("gauss", {{"base", 0.2}, {"amp", 0.7}, {"width", 0.3}});
  s.dirichlet = Expression::constant(0.2);
  const Solution sol = solve(s);
  CHECK(sol.u.min() >= 0.2 - 1e-12);
  CHECK(sol.u.max() <= 0.9 + 1e-12);
}

TEST_CASE("both_initial placement yields a square system") {
  Scenario s = sgn_x(16, 8);
  s.placement = DataPlacement::both_initial;
  const SparseSystem sys = assemble(s);
  CHECK(sys.size == 16 * 8);
  int diag = 0;
  for (std::size_t k = 0; k < sys.vals.size(); ++k) diag += sys.rows[k] == sys.cols[k];
  CHECK(diag == sys.size);
}

TEST_CASE("qmin on the heat solution") {
  const Scenario s = heat(128, 0.1, 128);
  const Solution sol = solve(s);
  const auto bank = bump_bank(s.grid, 20, 1e-2, 7);
  const QminResult q = qmin_ratio(sol.u, s, bank);
  CHECK(q.used == 20);
  CHECK(q.q >= 0.9);
  CHECK(q.q <= 1.1);

  std::vector<SpaceTimeField> with_zero = bank;
  with_zero.push_back(SpaceTimeField(s.grid, 0.0));
  const QminResult qz = qmin_ratio(sol.u, s, with_zero);
  CHECK(qz.skipped == 1);
  CHECK(qz.q == q.q);

  // A non-solution: add a large bump and test against it.
  const auto big = bump_bank(s.grid, 1, 1.0, 99);
  SpaceTimeField v = sol.u;
  for (std::size_t k = 0; k < v.values().size(); ++k) v.values()[k] += big[0].values()[k];
  std::vector<SpaceTimeField> bank2 = bank;
  bank2.push_back(big[0]);
  CHECK(qmin_ratio(v, s, bank2).q > 5.0);
}

TEST_CASE("structure condition") {
  const auto g = GridDomain::square(6, 6, 0, 1, 0, 1);
  const auto lam = WeightField::constant(g, 2.0, WeightKind::lambda);
  std::vector<double> u(36);
  for (int c = 0; c < 36; ++c) u[c] = g.center(c).x * g.center(c).x + 3 * g.center(c).y;
  const GradientField du = gradient(g, u);
  GradientField a = du, a2 = du, rot = du;
  for (int c = 0; c < 36; ++c) {
    a.gx[c] *= 2.0;
    a.gy[c] *= 2.0;
    a2.gx[c] *= 4.0;
    a2.gy[c] *= 4.0;
    rot.gx[c] = -2.0 * du.gy[c];
    rot.gy[c] = 2.0 * du.gx[c];
  }
  const std::vector<double> zero(36, 0.0);
  CHECK(structure_condition_check(a, zero, du, lam, 1.0, 1e-3));
  CHECK_FALSE(structure_condition_check(a2, zero, du, lam, 1.0, 1.0));
  CHECK(structure_condition_check(a2, zero, du, lam, 2.0, 1.0));
  CHECK_FALSE(structure_condition_check(rot, zero, du, lam, 5.0, 1.0));
}

TEST_CASE("solution export") {
  const Scenario s = heat(4, 0.01, 2);
  const Solution sol = solve(s);
  std::ostringstream csv;
  write_solution_csv(csv, sol.u, s.exact);
  const std::string text = csv.str();
  CHECK(text.rfind("t,x,u,exact,error\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 * 3);

  std::stringstream bin;
  write_solution_binary(bin, sol.u);
  const SpaceTimeField back = read_solution_binary(bin);
  CHECK(back.values() == sol.u.values());
  CHECK(back.grid().dt() == s.grid.dt());
}
