#include "mixlab/inequality_lab.hpp"

#include <algorithm>
#include <cmath>

#include "mixlab/error.hpp"

namespace mixlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double grad_norm(const GradientField& g, int c) { return g.norm(c); }

double weighted(const WeightField& w, const std::vector<int>& cells) { return w.measure(cells); }

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> x = a, y = b, out;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  return out;
}

}  // namespace

double Sides::ratio() const {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? kInf : 0.0;
}

bool hypothesis_holds(const SpatialField& u, const WeightField& nu, const Ball& ball, double tol) {
  const GridDomain& g = nu.grid();
  const auto cells = g.ball_cells(ball.center, ball.radius);
  double scale = 0.0;
  for (int c : cells) scale = std::max(scale, std::abs(u.values[c]));
  if (scale == 0.0) return true;
  if (u.hypothesis == FieldHypothesis::support_in_ball) {
    std::vector<char> in(g.num_cells(), 0);
    for (int c : cells) in[c] = 1;
    for (int c = 0; c < g.num_cells(); ++c)
      if (!in[c] && std::abs(u.values[c]) > tol * scale) return false;
    return true;
  }
  if (u.hypothesis == FieldHypothesis::zero_mean) {
    double m = 0.0, a = 0.0;
    for (int c : cells) {
      m += u.values[c] * nu[c];
      a += std::abs(u.values[c]) * nu[c];
    }
    return std::abs(m) <= tol * a;
  }
  return false;
}

Sides sobolev_poincare_sides(const SpatialField& u, const WeightField& nu, const WeightField& omega,
                             double p, double q, const Ball& ball) {
  if (!(p > 1.0) || !(q >= 1.0)) throw Error(ErrorKind::BadExponents, "need p > 1 and q >= 1");
  const GridDomain& g = nu.grid();
  const auto cells = g.ball_cells(ball.center, ball.radius);
  const GradientField du = gradient(g, u.values);
  double su = 0.0, sg = 0.0;
  for (int c : cells) {
    su += std::pow(std::abs(u.values[c]), q) * nu[c];
    sg += std::pow(grad_norm(du, c), p) * omega[c];
  }
  const double vol = g.cell_volume();
  Sides s;
  s.lhs = std::pow(su * vol / weighted(nu, cells), 1.0 / q);
  s.rhs = ball.radius * std::pow(sg * vol / weighted(omega, cells), 1.0 / p);
  s.hypothesis_unverified = !hypothesis_holds(u, nu, ball);
  s.impossible = s.rhs == 0.0 && s.lhs > 0.0;
  return s;
}

Sides gut_whee_sides(const SpatialField& u, const std::vector<int>& A, const WeightField& nu,
                     const WeightField& omega, const WeightField& upsilon, double kappa,
                     const Ball& ball, double gamma1, double varsigma1) {
  if (!(kappa > 1.0) || kappa > varsigma1) throw Error(ErrorKind::BadKappa, "kappa must lie in (1, varsigma1]");
  const GridDomain& g = nu.grid();
  const auto cells = g.ball_cells(ball.center, ball.radius);
  const auto inA = intersect(A, cells);
  const GradientField du = gradient(g, u.values);
  const double vol = g.cell_volume();
  double a2k = 0.0, a2 = 0.0, grad = 0.0;
  for (int c : inA) {
    const double v = std::abs(u.values[c]);
    a2k += std::pow(v, 2.0 * kappa) * upsilon[c];
    a2 += v * v * nu[c];
  }
  for (int c : cells) grad += std::pow(grad_norm(du, c), 2.0) * omega[c];
  Sides s;
  s.lhs = a2k * vol / weighted(upsilon, cells);
  s.rhs = gamma1 * gamma1 * ball.radius * ball.radius *
          std::pow(a2 * vol / weighted(nu, cells), kappa - 1.0) * (grad * vol / weighted(omega, cells));
  s.hypothesis_unverified = !hypothesis_holds(u, nu, ball);
  s.impossible = s.rhs == 0.0 && s.lhs > 0.0;
  return s;
}

Sides two_level_set_check(const SpatialField& v, double k, double l, const std::vector<int>& Z,
                          const WeightField& nu, const WeightField& omega, double p, double q,
                          const Ball& ball, double gamma1) {
  if (!(k < l)) throw Error(ErrorKind::DegenerateLevels, "need k < l");
  const GridDomain& g = nu.grid();
  const auto cells = g.ball_cells(ball.center, ball.radius);
  std::vector<char> inZ(g.num_cells(), 0);
  for (int c : Z) inZ[c] = 1;
  const GradientField dv = gradient(g, v.values);
  const double vol = g.cell_volume();
  double below = 0.0, above = 0.0, nubar = 0.0, band = 0.0;
  for (int c : cells) {
    const double x = v.values[c];
    const double nb = inZ[c] ? 0.0 : nu[c];
    nubar += nb;
    if (x < k) below += nb;
    if (x > l) above += nb;
    if (x > k && x < l) band += std::pow(grad_norm(dv, c), p) * omega[c];
  }
  Sides s;
  s.lhs = std::pow(l - k, q) * below * vol * above * vol;
  s.rhs = std::pow(2.0 * gamma1 * ball.radius, q) * nubar * vol * weighted(nu, cells) *
          std::pow(weighted(omega, cells), -q / p) * std::pow(band * vol, q / p);
  s.impossible = s.rhs == 0.0 && s.lhs > 0.0;
  return s;
}

Sides time_integrated_sides(const SpaceTimeField& u, const WeightField& nu, const WeightField& omega,
                            const Ball& ball, double a, double b, const TimeIntegratedParams& prm) {
  const GridDomain& g = u.grid();
  const auto win = g.quadrature_window(a, b);
  Sides s;
  if (win.weights.empty()) return s;
  const auto cells = g.ball_cells(ball.center, ball.radius);
  const double vol = g.cell_volume();
  const double p = prm.p;
  const double nuB = weighted(nu, cells), omB = weighted(omega, cells);
  std::vector<double> slice(g.num_cells());
  auto load = [&](int n) {
    const double* un = u.slice(n);
    slice.assign(un, un + g.num_cells());
  };
  if (prm.which == TimeIntegrated::sobolev_poincare) {
    double su = 0.0, sg = 0.0;
    for (int n = win.n0; n <= win.n1; ++n) {
      load(n);
      const GradientField du = gradient(g, slice);
      double a1 = 0.0, a2 = 0.0;
      for (int c : cells) {
        a1 += std::pow(std::abs(slice[c]), p) * nu[c];
        a2 += std::pow(grad_norm(du, c), p) * omega[c];
      }
      su += win.weights[n - win.n0] * a1 * vol;
      sg += win.weights[n - win.n0] * a2 * vol;
    }
    s.lhs = std::pow(su / nuB, 1.0 / p);
    s.rhs = ball.radius * std::pow(sg / omB, 1.0 / p);
  } else if (prm.which == TimeIntegrated::two_level_set) {
    if (!(prm.k < prm.l)) throw Error(ErrorKind::DegenerateLevels, "need k < l");
    std::vector<char> inZ(g.num_cells(), 0);
    for (int c : prm.Z) inZ[c] = 1;
    double below = 0.0, above = 0.0, nubar = 0.0, band = 0.0;
    for (int n = win.n0; n <= win.n1; ++n) {
      load(n);
      const GradientField dv = gradient(g, slice);
      const double w = win.weights[n - win.n0] * vol;
      for (int c : cells) {
        const double nb = inZ[c] ? 0.0 : nu[c];
        nubar += w * nb;
        if (slice[c] < prm.k) below += w * nb;
        if (slice[c] > prm.l) above += w * nb;
        if (slice[c] > prm.k && slice[c] < prm.l) band += w * std::pow(grad_norm(dv, c), p) * omega[c];
      }
    }
    s.lhs = std::pow(prm.l - prm.k, p) * below * above;
    s.rhs = std::pow(2.0 * prm.gamma1 * ball.radius, p) * nubar * nuB / omB * band;
  } else {
    const double kappa = prm.kappa;
    if (!(kappa > 1.0)) throw Error(ErrorKind::BadKappa, "kappa must exceed 1");
    const WeightField& ups = prm.upsilon ? *prm.upsilon : nu;
    const auto inA = intersect(prm.A, cells);
    double e2k = 0.0, sup2 = 0.0, grad = 0.0;
    for (int n = win.n0; n <= win.n1; ++n) {
      load(n);
      const GradientField du = gradient(g, slice);
      const double w = win.weights[n - win.n0] * vol;
      double a2 = 0.0;
      for (int c : inA) {
        const double v = std::abs(slice[c]);
        e2k += w * std::pow(v, 2.0 * kappa) * ups[c];
        a2 += v * v * nu[c] * vol;
      }
      sup2 = std::max(sup2, a2);
      for (int c : cells) grad += w * std::pow(grad_norm(du, c), 2.0) * omega[c];
    }
    s.lhs = e2k / weighted(ups, cells);
    s.rhs = prm.gamma1 * prm.gamma1 * ball.radius * ball.radius * std::pow(sup2 / nuB, kappa - 1.0) *
            grad / omB;
  }
  s.impossible = s.rhs == 0.0 && s.lhs > 0.0;
  return s;
}

ConcentrationResult concentration_search(const SpatialField& u, const std::vector<int>& B,
                                         double sigma, double alpha, double beta, double eps,
                                         double delta, const WeightField& nu,
                                         const WeightField& omega, const Ball& ball) {
  const GridDomain& g = nu.grid();
  if (B.empty()) throw Error(ErrorKind::PreconditionFailed, "the set B is empty");
  SignPartition helper;
  helper.grid = g;
  const auto Bs = helper.eps_neighborhood(B, sigma);
  const auto ball_cells = g.ball_cells(ball.center, ball.radius);
  const GradientField du = gradient(g, u.values);
  double energy = 0.0;
  for (int c : Bs) energy += (du.gx[c] * du.gx[c] + du.gy[c] * du.gy[c]) * omega[c];
  energy *= g.cell_volume();
  const double rho = ball.radius;
  if (energy > beta * omega.measure(ball_cells) / (rho * rho))
    throw Error(ErrorKind::PreconditionFailed, "gradient bound on B^sigma fails");
  double above = 0.0;
  for (int c : B)
    if (u.values[c] > 1.0) above += nu[c];
  above *= g.cell_volume();
  if (above < alpha * nu.measure(ball_cells))
    throw Error(ErrorKind::PreconditionFailed, "measure bound nu({u>1} ∩ B) >= alpha nu(B_rho) fails");
  std::vector<char> inB(g.num_cells(), 0);
  for (int c : B) inB[c] = 1;
  std::vector<int> sorted = B;
  std::sort(sorted.begin(), sorted.end());
  for (double eta = 0.5; eta >= 1.0 / 64 - 1e-12; eta *= 0.5) {
    const double r = eta * rho;
    for (int c : sorted) {
      const Point x = g.center(c);
      if (!g.contains_ball(x, r)) continue;
      const auto sub = g.ball_cells(x, r);
      if (sub.empty()) continue;
      bool inside = true;
      for (int d : sub) inside = inside && inB[d];
      if (!inside) continue;
      double good = 0.0, total = 0.0;
      for (int d : sub) {
        total += nu[d];
        if (u.values[d] > eps) good += nu[d];
      }
      if (good > (1.0 - delta) * total) return {true, x, eta, r, good / total};
    }
  }
  return {};
}

}  // namespace mixlab
