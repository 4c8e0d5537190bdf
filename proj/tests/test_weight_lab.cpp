#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mixlab/error.hpp"
#include "mixlab/weight_lab.hpp"

using namespace mixlab;

namespace {

WeightField power_weight(const GridDomain& g, double beta) {
  Expression e;
  e.kind = "power";
  e.params = {{"beta", beta}};
  return WeightField::from_expression(g, e, WeightKind::derived);
}

// Exact oracle: integral of |x|^b over [a, c].
double int_power(double a, double c, double b) {
  auto F = [b](double x) { return (x < 0 ? -1.0 : 1.0) * std::pow(std::abs(x), b + 1.0) / (b + 1.0); };
  return F(c) - F(a);
}

double exact_ap(double beta, double r) {
  const double len = 2.0 * r;
  return std::sqrt(int_power(-r, r, beta) / len * int_power(-r, r, -beta) / len);
}

BallFamily at_origin(double r_min, double r_max) { return BallFamily::dyadic({{0.0, 0.0}}, r_min, r_max); }

}  // namespace

TEST_CASE("ap_constant of the constant weight is 1") {
  const GridDomain g = GridDomain::line(64, -1.0, 1.0);
  auto w = WeightField::constant(g, 3.0, WeightKind::derived);
  for (double p : {1.5, 2.0, 4.0}) CHECK(ap_constant(w, p, at_origin(0.125, 1.0)).value == doctest::Approx(1.0));
}

TEST_CASE("ap_constant of |x|^beta against exact integration") {
  const GridDomain g = GridDomain::line(10000, -1.0, 1.0);
  for (double beta : {-0.5, 0.5}) {
    const Measured m = ap_constant(power_weight(g, beta), 2.0, at_origin(0.125, 1.0));
    double oracle = 0.0;
    for (double r = 0.125; r <= 1.0; r *= 2.0) oracle = std::max(oracle, exact_ap(beta, r));
    CHECK(oracle == doctest::Approx(1.0 / std::sqrt(1.0 - beta * beta)));
    CHECK(std::abs(m.value / oracle - 1.0) < 0.01);
    CHECK(m.family_size == 4);
  }
}

TEST_CASE("ap_constant of |x|^-1.5 grows under refinement") {
  double prev = 0.0;
  for (int n : {256, 512, 1024, 2048}) {
    const GridDomain g = GridDomain::line(n, -1.0, 1.0);
    const double v = ap_constant(power_weight(g, -1.5), 2.0, at_origin(0.125, 1.0)).value;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("ap_constant errors") {
  const GridDomain g = GridDomain::line(16, -1.0, 1.0);
  CHECK_THROWS_AS(ap_constant(power_weight(g, 1.0), 2.0, BallFamily{}), Error);
  auto z = WeightField(g, std::vector<double>(16, 0.0), WeightKind::derived);
  try {
    ap_constant(z, 2.0, at_origin(0.25, 0.5));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveWeight);
  }
}

TEST_CASE("a_infty_params") {
  const GridDomain g = GridDomain::line(256, -1.0, 1.0);
  const auto one = a_infty_params(WeightField::constant(g, 1.0, WeightKind::derived), at_origin(0.125, 1.0), 4);
  CHECK(one.K == doctest::Approx(1.0));
  CHECK(one.varsigma == doctest::Approx(1.0));
  const auto lin = a_infty_params(power_weight(g, 1.0), at_origin(0.125, 1.0), 4);
  CHECK(lin.varsigma == doctest::Approx(1.0));
  CHECK(lin.K <= 2.0);
  // exact oracle: left half of B_r(0) carries half of int |x|
  CHECK(int_power(-0.5, 0.0, 1.0) / int_power(-0.5, 0.5, 1.0) == doctest::Approx(0.5));
  const auto cubic = a_infty_params(power_weight(g, 3.0), at_origin(0.125, 1.0), 4);
  CHECK(cubic.varsigma < 1.0);
  CHECK(cubic.within_cap);
}

TEST_CASE("doubling_constant") {
  const GridDomain g = GridDomain::line(256, -1.0, 1.0);
  CHECK(doubling_constant(WeightField::constant(g, 1.0, WeightKind::derived), at_origin(1.0 / 32, 0.5)).value ==
        doctest::Approx(2.0).epsilon(1e-12));
  // exact oracle: int_{-r}^{r} |x| = r^2
  CHECK(int_power(-0.4, 0.4, 1.0) / int_power(-0.2, 0.2, 1.0) == doctest::Approx(4.0));
  CHECK(doubling_constant(power_weight(g, 1.0), at_origin(1.0 / 32, 0.5)).value == doctest::Approx(4.0).epsilon(1e-9));
  try {
    doubling_constant(power_weight(g, 1.0), at_origin(0.25, 1.0));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BallEscapesDomain);
  }
  const double spike = doubling_constant(power_weight(g, -1.5), at_origin(1.0 / 32, 0.5)).value;
  CHECK(std::isfinite(spike));
}

TEST_CASE("reverse_holder_fit") {
  const GridDomain g = GridDomain::line(1024, -1.0, 1.0);
  const std::vector<double> deltas{1.0, 0.5, 0.25, 0.1};
  const auto c = reverse_holder_fit(WeightField::constant(g, 2.0, WeightKind::derived), at_origin(0.125, 1.0), deltas);
  CHECK(c.delta == 1.0);
  CHECK(c.c_rh == doctest::Approx(1.0));
  const auto r = reverse_holder_fit(power_weight(g, 0.5), at_origin(0.125, 1.0), deltas);
  CHECK(r.delta > 0.0);
  CHECK(std::isfinite(r.c_rh));
  const GridDomain fine = GridDomain::line(10000, -1.0, 1.0);
  Expression spike;
  spike.kind = "power";
  std::vector<double> v(fine.num_cells());
  for (int k = 0; k < fine.num_cells(); ++k) v[k] = std::exp(-1.0 / std::abs(fine.center(k).x));
  try {
    reverse_holder_fit(WeightField(fine, v, WeightKind::derived), at_origin(0.125, 1.0), deltas);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoFeasibleDelta);
  }
}

TEST_CASE("pair_condition_constant") {
  const GridDomain g = GridDomain::square(128, 128, -1.0, 1.0, -1.0, 1.0);
  auto one = WeightField::constant(g, 1.0, WeightKind::derived);
  const BallFamily f = BallFamily::dyadic({{0.0, 0.0}}, 0.125, 1.0);
  const Measured m = pair_condition_constant(one, one, 2.0, 4.0, 1.0, f);
  // closed form: (|B_r|/|B_R|)^{1/2 + 1/4 - 1/2}, largest at r/R = 1/2
  CHECK(m.value <= 1.0);
  CHECK(m.value == doctest::Approx(std::pow(0.25, 0.25)).epsilon(0.02));
  CHECK(m.family_size == 6);
  CHECK_THROWS_AS(pair_condition_constant(one, one, 4.0, 2.0, 1.0, f), Error);
  const GridDomain line = GridDomain::line(4096, -1.0, 1.0);
  auto nu = WeightField::constant(line, 1.0, WeightKind::derived);
  auto om = power_weight(line, 3.0);
  const double coarse = pair_condition_constant(nu, om, 2.0, 2.5, 0.0, at_origin(0.0625, 1.0)).value;
  const double finer = pair_condition_constant(nu, om, 2.0, 2.5, 0.0, at_origin(1.0 / 512, 1.0)).value;
  CHECK(finer > 4.0 * coarse);
}

TEST_CASE("build_mu_lambda_abs cases") {
  const GridDomain g = GridDomain::line(8, -1.0, 1.0);
  auto one = WeightField::constant(g, 1.0, WeightKind::lambda);
  CHECK(build_mu_lambda_abs(WeightField::constant(g, 1.0, WeightKind::mu), one).values() == std::vector<double>(8, 1.0));
  Expression s;
  s.kind = "sgn_x";
  CHECK(build_mu_lambda_abs(WeightField::from_expression(g, s, WeightKind::mu), one).values() ==
        std::vector<double>(8, 1.0));
  Expression half;
  half.kind = "piecewise";
  half.params = {{"at", 0.0}, {"left", 0.0}, {"right", 1.0}};
  auto two = WeightField::constant(g, 2.0, WeightKind::lambda);
  const auto v = build_mu_lambda_abs(WeightField::from_expression(g, half, WeightKind::mu), two).values();
  CHECK(v == std::vector<double>{2, 2, 2, 2, 1, 1, 1, 1});
  CHECK_THROWS_AS(WeightField(g, std::vector<double>(8, 0.0), WeightKind::lambda), Error);
}

TEST_CASE("partition_and_interface") {
  const GridDomain g = GridDomain::square(16, 16, -1.0, 1.0, -1.0, 1.0);
  auto plus = partition_and_interface(WeightField::constant(g, 1.0, WeightKind::mu));
  CHECK(plus.interface_cells.empty());
  CHECK(plus.plus_components == 1);
  Expression cross;
  cross.kind = "sgn_xy";
  auto part = partition_and_interface(WeightField::from_expression(g, cross, WeightKind::mu));
  CHECK(part.plus_components == 2);
  CHECK(part.minus_components == 2);
  CHECK(part.zero_components == 0);
  // flood-fill oracle: every cell on the two central rows or columns is an interface cell
  int expected = 0;
  for (int c = 0; c < g.num_cells(); ++c) {
    const bool axis = g.col(c) == 7 || g.col(c) == 8 || g.row(c) == 7 || g.row(c) == 8;
    expected += axis;
    CHECK(static_cast<bool>(part.in_interface[c]) == axis);
  }
  CHECK(static_cast<int>(part.interface_cells.size()) == expected);
  CHECK(part.interface_plus == part.interface_cells);
  Expression cusp;
  cusp.kind = "cusp_n";
  cusp.params = {{"n", 1.0}};
  auto cp = partition_and_interface(WeightField::from_expression(g, cusp, WeightKind::mu));
  CHECK(cp.plus_components == 1);
  for (int c : cp.interface_cells) {
    const Point p = g.center(c);
    // rasterisation oracle: interface cells sit within one cell diagonal of y = ±x, x > 0
    CHECK(p.x > -0.2);
    CHECK(std::abs(std::abs(p.y) - std::max(p.x, 0.0)) < 0.2);
  }
}

TEST_CASE("h4_constant") {
  const GridDomain line = GridDomain::line(256, -1.0, 1.0);
  auto mu1 = WeightField::constant(line, 1.0, WeightKind::mu);
  auto lam1 = WeightField::constant(line, 1.0, WeightKind::lambda);
  const auto r = h4_constant(mu1, lam1, partition_and_interface(mu1), at_origin(1.0 / 32, 0.5));
  CHECK(r.q == doctest::Approx(2.0));
  const GridDomain g = GridDomain::square(128, 128, -1.0, 1.0, -1.0, 1.0);
  auto lam = WeightField::constant(g, 1.0, WeightKind::lambda);
  Expression cn;
  cn.kind = "cusp_n";
  cn.params = {{"n", 3.0}};
  auto mun = WeightField::from_expression(g, cn, WeightKind::mu);
  const BallFamily f = BallFamily::dyadic({{0.0, 0.0}}, 1.0 / 16, 0.5);
  const auto hn = h4_constant(mun, lam, partition_and_interface(mun), f);
  CHECK(std::isfinite(hn.q));
  CHECK(hn.q < 100.0);
  Expression ce;
  ce.kind = "cusp_exp";
  auto mue = WeightField::from_expression(g, ce, WeightKind::mu);
  const auto he = h4_constant(mue, lam, partition_and_interface(mue), f);
  CHECK(he.q > 1000.0);
  CHECK(he.line == "mu_plus");
}

TEST_CASE("h5_decay") {
  const GridDomain g = GridDomain::square(64, 64, -1.0, 1.0, -1.0, 1.0);
  Expression s;
  s.kind = "sgn_x";
  auto part = partition_and_interface(WeightField::from_expression(g, s, WeightKind::mu));
  const double h = g.cell_size(0);
  std::vector<double> eps;
  for (int k = 8; k >= 1; --k) eps.push_back(k * h);
  const auto d = h5_decay(part, eps);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i].second == doctest::Approx(4.0 * d[i].first));
  CHECK(std::abs(h5_intercept(d)) <= g.cell_volume());
  Expression cross;
  cross.kind = "sgn_xy";
  auto cp = partition_and_interface(WeightField::from_expression(g, cross, WeightKind::mu));
  const auto dc = h5_decay(cp, eps);
  for (std::size_t i = 0; i < dc.size(); ++i) {
    // strip-area oracle: two crossing strips of width 2 eps in a box of side 2
    const double e = dc[i].first;
    CHECK(dc[i].second == doctest::Approx(8.0 * e - 4.0 * e * e).epsilon(0.05));
    if (i > 0) CHECK(dc[i].second <= dc[i - 1].second);
  }
}

TEST_CASE("h_of") {
  const GridDomain g = GridDomain::line(64, -1.0, 1.0);
  auto one = WeightField::constant(g, 1.0, WeightKind::lambda);
  CHECK(h_of({0.0, 0.0}, 0.5, one, one) == doctest::Approx(1.0));
  auto zero = WeightField::constant(g, 0.0, WeightKind::mu);
  CHECK(h_of({0.0, 0.0}, 0.5, build_mu_lambda_abs(zero, one), one) == doctest::Approx(1.0));
  auto two = build_mu_lambda_abs(WeightField::constant(g, 2.0, WeightKind::mu), one);
  CHECK(h_of({0.0, 0.0}, 0.5, two, one) == doctest::Approx(2.0));
  CHECK(f_of({0.0, 0.0}, 0.5, two, one) == doctest::Approx(0.5));
  CHECK_THROWS_AS(h_of({0.9, 0.0}, 0.5, one, one), Error);
}

TEST_CASE("h_of respects the two-sided bound with the measured q") {
  const GridDomain g = GridDomain::square(96, 96, -1.0, 1.0, -1.0, 1.0);
  Expression cross;
  cross.kind = "sgn_xy";
  cross.params = {{"scale", 2.0}};
  auto mu = WeightField::from_expression(g, cross, WeightKind::mu);
  Expression lx;
  lx.kind = "power";
  lx.params = {{"beta", 0.5}, {"a", 0.1}, {"b", 0.2}};
  auto lam = WeightField::from_expression(g, lx, WeightKind::lambda);
  auto mla = build_mu_lambda_abs(mu, lam);
  BallFamily f = BallFamily::dyadic({{0.0, 0.0}, {0.25, -0.25}, {-0.125, 0.125}}, 1.0 / 16, 0.25);
  const double q = std::max(doubling_constant(mla, f).value, doubling_constant(lam, f).value);
  for (const Ball& b : f.balls()) {
    const double h1 = h_of(b.center, b.radius, mla, lam), h2 = h_of(b.center, 2 * b.radius, mla, lam);
    CHECK(h1 <= q * h2);
    CHECK(h2 <= q * h1);
  }
}

TEST_CASE("kappa_tau") {
  const GridDomain g = GridDomain::square(16, 16, -1.0, 1.0, -1.0, 1.0);
  auto one = WeightField::constant(g, 1.0, WeightKind::lambda);
  const BallFamily f = BallFamily::dyadic({{0.0, 0.0}, {0.25, 0.25}}, 0.25, 0.5);
  const auto same = kappa_tau(one, one, f, 4);
  CHECK(same.kappa == doctest::Approx(1.0));
  CHECK(same.tau == 1.0);
  std::vector<double> checker(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) checker[c] = (g.col(c) + g.row(c)) % 2 ? 2.0 : 1.0;
  const auto ck = kappa_tau(WeightField(g, checker, WeightKind::mu_lambda_abs), one, f, 4);
  CHECK(ck.kappa <= 2.0);
  CHECK(ck.tau == 1.0);
  const GridDomain line = GridDomain::line(2048, -1.0, 1.0);
  auto l1 = WeightField::constant(line, 1.0, WeightKind::lambda);
  Expression p;
  p.kind = "power";
  p.params = {{"beta", 0.5}};
  const auto pk = kappa_tau(WeightField::from_expression(line, p, WeightKind::mu_lambda_abs), l1,
                            at_origin(0.125, 1.0), 4);
  CHECK(pk.tau < 1.0);
  CHECK(pk.kappa <= 2.0);
}

TEST_CASE("hp2_prime") {
  const auto a = hp2_prime(1.5, 4.0, 1.2, 1.0, 0.1, 2);
  CHECK(a.q_tilde == doctest::Approx(1.0 / 0.35));
  CHECK(a.q_tilde > 2.0);
  CHECK(a.q_tilde < 4.0);
  CHECK(a.alpha == doctest::Approx(0.8));
  CHECK(a.K2_tilde == doctest::Approx(std::pow(1.2, 0.1) * 1.5));
  CHECK(hp2_prime(1.5, 4.0, 1.0, 1.0, 0.1, 2).K2_tilde == doctest::Approx(1.5));
  try {
    hp2_prime(1.5, 2.0, 1.0, 1.0, 0.1, 2);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InfeasibleChain);
  }
}

TEST_CASE("A_p consequence holds on every subset of a coarse ball") {
  const GridDomain g = GridDomain::line(24, -1.0, 1.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  std::vector<double> v(g.num_cells());
  for (double& x : v) x = u(rng);
  WeightField w(g, v, WeightKind::derived);
  const BallFamily f = at_origin(0.25, 0.5);
  for (double p : {1.5, 2.0, 3.0}) {
    const double K = ap_constant(w, p, f).value;
    for (const Ball& b : f.balls()) {
      const auto cells = g.ball_cells(b.center, b.radius);
      const int m = static_cast<int>(cells.size());
      REQUIRE(m <= 16);
      double total = 0.0;
      for (int c : cells) total += v[c];
      for (unsigned mask = 1; mask < (1u << m); ++mask) {
        double ws = 0.0;
        int count = 0;
        for (int k = 0; k < m; ++k)
          if (mask & (1u << k)) {
            ws += v[cells[k]];
            ++count;
          }
        CHECK(std::pow(static_cast<double>(count) / m, p) <= K * ws / total * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("sup-type constants never decrease as the family grows") {
  const GridDomain g = GridDomain::line(512, -1.0, 1.0);
  auto w = power_weight(g, 0.5);
  BallFamily small = at_origin(0.125, 0.25);
  BallFamily big = at_origin(1.0 / 64, 0.25);
  big.centers.push_back({0.25, 0.0});
  CHECK(ap_constant(w, 2.0, big).value >= ap_constant(w, 2.0, small).value);
  CHECK(doubling_constant(w, big).value >= doubling_constant(w, small).value);
  CHECK(a_infty_params(w, big, 2).K >= 1.0);
  // p-monotonicity: p' < p keeps the constant finite
  CHECK(std::isfinite(ap_constant(w, 1.8, big).value));
}
