#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mixlab/degiorgi.hpp"
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

Scenario heat(int nx, int steps) {
  Scenario s;
  s.grid = GridDomain::line(nx, 0.0, 1.0, steps, 0.1 / steps);
  s.data_plus = expr("sin_pi", {{"amp", 1.0}});
  return s;
}

DgContext context(const Scenario& s) { return DgContext(s.mu_field(), s.lambda_field()); }

CylinderLadder single(double theta_tilde, double eps_fraction) {
  CylinderLadder l;
  l.radii = {{0.5, 0.75}};
  l.theta_tilde = {theta_tilde};
  l.eps_fractions = {eps_fraction};
  return l;
}

bool includes(const std::vector<int>& big, const std::vector<int>& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

TEST_CASE("cylinders for mu = 1") {
  const Scenario s = heat(64, 64);
  const DgContext ctx = context(s);
  CHECK(ctx.part.interface_cells.empty());
  const auto specs = build_cylinders(ctx, {0.5, 0}, 0.05, 0.25, 0.5, CylinderKind::plus, single(0.0, 0.0));
  REQUIRE(specs.size() == 1);
  const auto& sp = specs[0];
  CHECK(sp.h == doctest::Approx(1.0));
  CHECK(sp.s2 == doctest::Approx(0.05 + 0.5 * 0.0625));
  CHECK(sp.theta == doctest::Approx(0.0625));
  auto ball = s.grid.ball_cells({0.5, 0}, 0.125);
  std::sort(ball.begin(), ball.end());
  const auto q = q_sets(ctx, sp, 0.125, sp.theta, 0.0);
  CHECK(q.late_cells == ball);
  CHECK(q.early_cells.empty());
  const auto [a, b] = s.grid.level_window(0.05 + sp.sigma(sp.theta), sp.s2);
  CHECK(q.late_n0 == a);
  CHECK(q.late_n1 == b - 1);

  // theta = 0, eps = 0: the whole window (t0, s2).
  const auto q0 = q_sets(ctx, sp, 0.125, 0.0, 0.0);
  CHECK(q0.late_n0 == s.grid.nearest_level(0.05));
  CHECK(q0.late_n1 == s.grid.nearest_level(sp.s2) - 1);

  CHECK_THROWS_AS(build_cylinders(ctx, {0.1, 0}, 0.05, 0.25, 0.5, CylinderKind::plus, single(0, 0)), Error);
  CHECK_THROWS_AS(build_cylinders(ctx, {0.5, 0}, 0.09, 0.25, 0.5, CylinderKind::plus, single(0, 0)), Error);
}

TEST_CASE("cylinders on the cross: positive quadrants only") {
  Scenario s;
  s.grid = GridDomain::square(32, 32, -1, 1, -1, 1, 8, 0.125);
  s.mu = expr("sgn_xy", {});
  const DgContext ctx = context(s);
  const Point x0{0.0, 0.0};
  const auto sp = build_cylinders(ctx, x0, 0.5, 0.5, 1.0, CylinderKind::plus, single(0.0, 0.0)).front();
  const auto q = q_plain_sets(ctx, sp, 0.4, 0.0);
  int oracle = 0;
  for (int c = 0; c < s.grid.num_cells(); ++c) {
    const Point p = s.grid.center(c);
    if (p.x * p.x + p.y * p.y <= 0.16 && p.x * p.y > 0) ++oracle;
  }
  CHECK(static_cast<int>(q.late_cells.size()) == oracle);
  for (int c : q.late_cells) CHECK(s.grid.center(c).x * s.grid.center(c).y > 0);

  // Fattening grows the sets.
  const auto q0 = q_sets(ctx, sp, 0.2, 0.1, 0.0);
  const auto q1 = q_sets(ctx, sp, 0.2, 0.1, 0.1);
  CHECK(includes(q1.late_cells, q0.late_cells));
  CHECK(includes(q1.early_cells, q0.early_cells));
  CHECK(includes(q0.late_cells, q_plain_sets(ctx, sp, 0.2, 0.1).late_cells));
}

TEST_CASE("energy_sides: trivial cases and covariance") {
  const Scenario s = heat(64, 64);
  const DgContext ctx = context(s);
  const Solution sol = solve(s);
  const auto specs = build_cylinders(ctx, {0.5, 0}, 0.05, 0.25, 0.76, CylinderKind::plus, CylinderLadder{});

  SpaceTimeField c(s.grid, 0.3);
  for (const auto& sp : specs) {
    const auto r = energy_sides(c, 0.3, sp, ctx, 1);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
    CHECK(energy_sides(sol.u, 2.0, sp, ctx, 1).lhs == 0.0);
  }
  for (const auto& sp : specs) {
    const auto r = energy_sides(sol.u, 0.0, sp, ctx, 1);
    CHECK(r.lhs > 0.0);
    CHECK(r.rhs > 0.0);
    CHECK(std::isfinite(r.implied_gamma));
    for (double k : {0.1, 0.4}) {
      const auto a = energy_sides(sol.u, k, sp, ctx, 1);
      const auto b = energy_sides(sol.u.scaled(2.0), 2.0 * k, sp, ctx, 1);
      const auto m = energy_sides(sol.u.shifted(3.0), k + 3.0, sp, ctx, -1);
      const auto m0 = energy_sides(sol.u, k, sp, ctx, -1);
      CHECK(b.lhs == doctest::Approx(4.0 * a.lhs).epsilon(1e-9));
      CHECK(b.rhs == doctest::Approx(4.0 * a.rhs).epsilon(1e-9));
      CHECK(b.implied_gamma == doctest::Approx(a.implied_gamma).epsilon(1e-9));
      CHECK(m.lhs == doctest::Approx(m0.lhs).epsilon(1e-9));
      CHECK(m.rhs == doctest::Approx(m0.rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("gamma_fit: constant, heat refinement and a temporal jump") {
  Scenario s = heat(64, 64);
  {
    const DgContext ctx = context(s);
    const auto rep = gamma_fit(SpaceTimeField(s.grid, 1.0), ctx, default_sweep(s.grid));
    CHECK(rep.gamma == 1.0);
  }
  std::vector<double> g, spike;
  for (int level = 0; level < 3; ++level) {
    const DgContext ctx = context(s);
    const Solution sol = solve(s);
    const auto sweep = default_sweep(s.grid);
    const auto rep = gamma_fit(sol.u, ctx, sweep);
    CHECK(rep.in_dg_plus);
    CHECK(rep.in_dg_minus);
    g.push_back(rep.gamma);
    SpaceTimeField v = sol.u;
    const int n = s.grid.nearest_level(0.07);
    for (int c = 0; c < s.grid.num_cells(); ++c) v(c, n) += 1.0;
    spike.push_back(gamma_fit(v, ctx, sweep).gamma);
    s = s.refined(true);
  }
  for (int i = 0; i + 1 < 3; ++i) {
    CHECK(std::max(g[i] / g[i + 1], g[i + 1] / g[i]) <= 1.5);
    CHECK(spike[i + 1] >= 3.0 * spike[i]);
  }
}

TEST_CASE("linfty_check") {
  Scenario one = heat(32, 32);
  const DgContext c1 = context(one);
  const auto r = linfty_check(SpaceTimeField(one.grid, 1.0), c1, {0.5, 0}, 0.0, 0.25, 1.0, LinftyCase::i);
  CHECK(r.ess_sup == 1.0);
  // Both averages of the display equal one.
  CHECK(r.energy == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.c_inf == doctest::Approx(1.0 / std::sqrt(2.0)));

  Scenario s = heat(64, 64);
  std::vector<double> cs;
  for (int level = 0; level < 2; ++level) {
    const auto sol = solve(s);
    const auto res = linfty_check(sol.u, context(s), {0.5, 0}, 0.0, 0.5, 0.4, LinftyCase::i);
    CHECK(std::isfinite(res.c_inf));
    CHECK(res.c_inf > 0.0);
    cs.push_back(res.c_inf);
    s = s.refined(true);
  }
  CHECK(cs[1] / cs[0] == doctest::Approx(1.0).epsilon(0.25));

  Scenario ell;
  ell.grid = GridDomain::line(64, 0, 1, 16, 1.0 / 16);
  ell.mu = Expression::constant(0.0);
  ell.dirichlet = expr("linear", {{"bx", 1.0}});
  const auto sol = solve(ell);
  const auto res = linfty_check(sol.u, context(ell), {0.5, 0}, 0.25, 0.4, 1.0, LinftyCase::iii);
  CHECK(std::isfinite(res.c_inf));
  CHECK(res.ess_sup == doctest::Approx(0.7).epsilon(0.02));
  CHECK_THROWS_AS(linfty_check(sol.u, context(ell), {0.5, 0}, 0.25, 0.4, 1.0, LinftyCase::i), Error);
}

TEST_CASE("truncation iteration trace") {
  const Scenario s = heat(64, 64);
  const DgContext ctx = context(s);
  const auto zero = truncation_iteration_trace(SpaceTimeField(s.grid, 0.0), ctx, 0.0, 1.0, 0.5, {0.5, 0}, 0.0, 0.4);
  for (double v : zero.value) CHECK(v == 0.0);

  const auto sol = solve(s);
  const double u0 = truncation_iteration_trace(sol.u, ctx, 0.0, 0.0, 0.5, {0.5, 0}, 0.0, 0.4, 1).value[0];
  CHECK(u0 > 0.0);
  const double cp = c_plus(1.0, 1.0, 1.5, 0.4);
  const double d = linfty_d(cp, 1.5, u0);
  CHECK(u0 < smallness_threshold(cp, 1.5, d));
  const auto tr = truncation_iteration_trace(sol.u, ctx, 0.0, d, 0.5, {0.5, 0}, 0.0, 0.4);
  CHECK(tr.nonincreasing);
  CHECK(tr.value.back() < 1e-12);
  CHECK(tr.k[1] == doctest::Approx(0.5 * d));
  CHECK(tr.r[0] == doctest::Approx(0.5));
  CHECK(tr.theta[1] == doctest::Approx(0.375));

  // A moderate d still gives a nonincreasing trace.
  const auto mid = truncation_iteration_trace(sol.u, ctx, 0.0, 0.5, 0.5, {0.5, 0}, 0.0, 0.4);
  CHECK(mid.nonincreasing);
  CHECK(mid.value.back() < mid.value.front());
}
