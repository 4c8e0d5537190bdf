#include "mixlab/degiorgi.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include "mixlab/error.hpp"
#include "mixlab/weight_lab.hpp"

namespace mixlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-9;

struct Levels {
  int n0 = 0;
  int n1 = -1;
  bool empty() const { return n1 < n0; }
  int count() const { return std::max(0, n1 - n0 + 1); }
};

Levels clamp(const GridDomain& g, int n0, int n1) { return {std::max(n0, 0), std::min(n1, g.time_steps())}; }

// Integration levels a <= t_n < b.
Levels forward_levels(const GridDomain& g, double a, double b) {
  if (!(b > a)) return {};
  return clamp(g, static_cast<int>(std::ceil(a / g.dt() - kTol)),
               static_cast<int>(std::ceil(b / g.dt() - kTol)) - 1);
}

// Integration levels a < t_n <= b, the mirror image of forward_levels.
Levels backward_levels(const GridDomain& g, double a, double b) {
  if (!(b > a)) return {};
  return clamp(g, static_cast<int>(std::floor(a / g.dt() + kTol)) + 1,
               static_cast<int>(std::floor(b / g.dt() + kTol)));
}

// Levels for a supremum over (a, b): [ceil a, floor b].
Levels sup_levels(const GridDomain& g, double a, double b) {
  if (!(b > a)) return {};
  const auto [n0, n1] = g.level_window(a, b);
  return {n0, n1};
}

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<int> unite(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> subtract(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Label side_of(CylinderKind k) {
  if (k == CylinderKind::plus || k == CylinderKind::iv) return Label::plus;
  if (k == CylinderKind::minus || k == CylinderKind::v) return Label::minus;
  return Label::zero;
}

std::vector<int> labelled_ball(const DgContext& ctx, const Point& x0, double rho, Label s) {
  return ctx.ball(x0, rho, s);
}

const std::vector<char>& interface_mask(const DgContext& ctx, Label s) {
  if (s == Label::plus) return ctx.part.in_plus_interface;
  if (s == Label::minus) return ctx.part.in_minus_interface;
  return ctx.part.in_zero_interface;
}

// I ∩ closure(B_rho^s).
std::vector<int> interface_ball(const DgContext& ctx, const Point& x0, double rho, Label s) {
  const auto& mask = interface_mask(ctx, s);
  std::vector<int> out;
  for (int c : ctx.grid.ball_cells(x0, rho))
    if (mask[c]) out.push_back(c);
  return sorted(out);
}

std::vector<int> fatten(const DgContext& ctx, const std::vector<int>& cells, double eps) {
  return sorted(ctx.part.eps_neighborhood(cells, eps));
}

double sup_sum(const SpaceTimeField& u, const std::vector<int>& cells, const std::vector<double>& w,
               Levels lv, const Truncation& t) {
  if (cells.empty() || lv.empty()) return 0.0;
  const auto s = kernels::slice_sums(u, cells, &w, lv.n0, lv.n1, t);
  return *std::max_element(s.begin(), s.end());
}

double int_sum(const SpaceTimeField& u, const std::vector<int>& cells, const std::vector<double>& w,
               Levels lv, const Truncation& t) {
  if (cells.empty() || lv.empty()) return 0.0;
  double acc = 0.0;
  for (double v : kernels::slice_sums(u, cells, &w, lv.n0, lv.n1, t)) acc += v;
  return acc * u.grid().dt();
}

double int_grad(const SpaceTimeField& u, const std::vector<int>& cells, const std::vector<double>& w,
                Levels lv, const Truncation& t) {
  if (cells.empty() || lv.empty()) return 0.0;
  double acc = 0.0;
  for (double v : kernels::slice_gradient_energy(u, cells, &w, lv.n0, lv.n1, t)) acc += v;
  return acc * u.grid().dt();
}

double over_pieces(const SpaceTimeField& u, const CylinderPieces& q, const std::vector<double>& w,
                   const Truncation& t, bool gradient) {
  auto f = gradient ? int_grad : int_sum;
  return f(u, q.late_cells, w, {q.late_n0, q.late_n1}, t) +
         f(u, q.early_cells, w, {q.early_n0, q.early_n1}, t);
}

double ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? kInf : 0.0;
}

}  // namespace

std::string to_string(CylinderKind k) {
  switch (k) {
    case CylinderKind::plus: return "plus";
    case CylinderKind::minus: return "minus";
    case CylinderKind::zero: return "zero";
    case CylinderKind::iv: return "iv";
    case CylinderKind::v: return "v";
  }
  return "?";
}

DgContext::DgContext(const WeightField& mu, const WeightField& lam, double zero_tol)
    : grid(mu.grid()), part(partition_and_interface(mu, zero_tol)) {
  const int n = grid.num_cells();
  mu_plus = mu.positive_part();
  mu_minus = mu.negative_part();
  lambda = lam.values();
  lambda_plus.assign(n, 0.0);
  lambda_minus.assign(n, 0.0);
  lambda_zero.assign(n, 0.0);
  for (int c = 0; c < n; ++c) {
    if (part.labels[c] == Label::plus) lambda_plus[c] = lambda[c];
    if (part.labels[c] == Label::minus) lambda_minus[c] = lambda[c];
    if (part.labels[c] == Label::zero) lambda_zero[c] = lambda[c];
  }
  mu_lambda_abs = build_mu_lambda_abs(mu, lam, zero_tol).values();
}

double DgContext::h(const Point& x0, double R) const {
  const auto cells = grid.ball_cells(x0, R);
  double a = 0.0, l = 0.0;
  for (int c : cells) {
    a += mu_lambda_abs[c];
    l += lambda[c];
  }
  return a / l;
}

std::vector<int> DgContext::ball(const Point& x0, double rho, Label s) const {
  std::vector<int> out;
  for (int c : grid.ball_cells(x0, rho))
    if (part.labels[c] == s) out.push_back(c);
  return sorted(out);
}

std::vector<CylinderSpec> build_cylinders(const DgContext& ctx, const Point& x0, double t0, double R,
                                          double beta, CylinderKind kind,
                                          const CylinderLadder& ladder, double s1, double s2) {
  const GridDomain& g = ctx.grid;
  if (!g.contains_ball(x0, R)) throw Error(ErrorKind::CylinderEscapes, "ball leaves the domain");
  CylinderSpec base;
  base.x0 = x0;
  base.t0 = t0;
  base.R = R;
  base.beta = beta;
  base.kind = kind;
  base.h = ctx.h(x0, R);
  const double height = beta * base.h * R * R;
  if (kind == CylinderKind::zero && s2 > s1) {
    base.s1 = s1;
    base.s2 = s2;
  } else {
    base.s1 = t0 - height;
    base.s2 = t0 + height;
  }
  const double T = g.final_time();
  const double slack = kTol * std::max(1.0, T);
  const Label side = side_of(kind);
  const bool need_after = side != Label::minus;
  const bool need_before = side != Label::plus;
  if ((need_after && base.s2 > T + slack) || (need_before && base.s1 < -slack))
    throw Error(ErrorKind::CylinderEscapes, "time window leaves (0, T)");

  std::vector<CylinderSpec> out;
  for (const auto& [fr, frt] : ladder.radii) {
    CylinderSpec s = base;
    s.r = fr * R;
    s.r_tilde = frt * R;
    if (!(s.r < s.r_tilde) || s.r_tilde > R * (1 + kTol))
      throw Error(ErrorKind::InvalidInput, "need r < r~ <= R");
    if (kind == CylinderKind::iv || kind == CylinderKind::v) {
      out.push_back(s);
      continue;
    }
    for (double tt : ladder.theta_tilde) {
      s.theta_tilde = tt;
      s.theta = tt + (s.r_tilde - s.r) * (s.r_tilde - s.r) / (R * R);
      if (s.theta >= 1.0) continue;
      for (double ef : ladder.eps_fractions) {
        s.eps = ef * (R - s.r_tilde);
        out.push_back(s);
      }
    }
  }
  return out;
}

CylinderPieces q_sets(const DgContext& ctx, const CylinderSpec& spec, double rho, double theta,
                      double delta) {
  const GridDomain& g = ctx.grid;
  const Label side = side_of(spec.kind);
  CylinderPieces q;
  auto set_late = [&](Levels lv) {
    q.late_n0 = lv.n0;
    q.late_n1 = lv.n1;
  };
  auto set_early = [&](Levels lv) {
    q.early_n0 = lv.n0;
    q.early_n1 = lv.n1;
  };
  if (side == Label::zero) {
    q.late_cells = fatten(ctx, labelled_ball(ctx, spec.x0, rho, Label::zero), delta);
    set_late(forward_levels(g, spec.s1, spec.s2));
    return q;
  }
  const double sig = spec.sigma(theta);
  if (side == Label::plus) {
    set_late(forward_levels(g, spec.t0 + sig, spec.s2));
    set_early(forward_levels(g, spec.t0, spec.t0 + sig));
  } else {
    set_late(backward_levels(g, spec.s1, spec.t0 - sig));
    set_early(backward_levels(g, spec.t0 - sig, spec.t0));
  }
  const auto full = sorted(g.ball_cells(spec.x0, rho + delta));
  const auto same = labelled_ball(ctx, spec.x0, rho + delta, side);
  if (same.size() == full.size()) {
    q.late_cells = full;
    return q;
  }
  const auto b = fatten(ctx, labelled_ball(ctx, spec.x0, rho, side), delta);
  const auto i = fatten(ctx, interface_ball(ctx, spec.x0, rho, side), delta);
  q.late_cells = unite(b, i);
  q.early_cells = i;
  return q;
}

CylinderPieces q_plain_sets(const DgContext& ctx, const CylinderSpec& spec, double rho, double theta) {
  const GridDomain& g = ctx.grid;
  const Label side = side_of(spec.kind);
  CylinderPieces q;
  q.late_cells = labelled_ball(ctx, spec.x0, rho, side);
  const double sig = spec.sigma(theta);
  Levels lv;
  if (side == Label::zero)
    lv = forward_levels(g, spec.s1, spec.s2);
  else if (side == Label::plus)
    lv = forward_levels(g, spec.t0 + sig, spec.s2);
  else
    lv = backward_levels(g, spec.s1, spec.t0 - sig);
  q.late_n0 = lv.n0;
  q.late_n1 = lv.n1;
  return q;
}

EnergyRecord energy_sides(const SpaceTimeField& u, double k, const CylinderSpec& spec,
                          const DgContext& ctx, int sign) {
  const GridDomain& g = u.grid();
  const Truncation tr{k, sign};
  const Label side = side_of(spec.kind);
  EnergyRecord rec;
  rec.kind = spec.kind;
  rec.sign = sign;
  rec.k = k;
  rec.eps = spec.eps;
  rec.theta_tilde = spec.theta_tilde;
  const double gap = spec.r_tilde - spec.r;
  const double inv_gap2 = 1.0 / (gap * gap);

  if (side == Label::zero) {
    const auto b0 = labelled_ball(ctx, spec.x0, spec.r, Label::zero);
    if (b0.empty()) {
      rec.empty = true;
      return rec;
    }
    const Levels lv = forward_levels(g, spec.s1, spec.s2);
    const Levels sv = sup_levels(g, spec.s1, spec.s2);
    rec.lhs = int_grad(u, fatten(ctx, b0, spec.eps), ctx.lambda, lv, tr);
    const auto i0 = interface_ball(ctx, spec.x0, spec.r, Label::zero);
    const auto out = subtract(fatten(ctx, i0, gap + spec.eps), b0);
    rec.rhs = sup_sum(u, out, ctx.mu_minus, sv, tr) + sup_sum(u, out, ctx.mu_plus, sv, tr) +
              inv_gap2 * int_sum(u, fatten(ctx, b0, gap + spec.eps), ctx.lambda, lv, tr);
    rec.implied_gamma = ratio(rec.lhs, rec.rhs);
    return rec;
  }

  const bool plus = side == Label::plus;
  const auto& w_same = plus ? ctx.mu_plus : ctx.mu_minus;
  const auto& w_other = plus ? ctx.mu_minus : ctx.mu_plus;
  const auto b_r = labelled_ball(ctx, spec.x0, spec.r, side);
  const auto i_r = interface_ball(ctx, spec.x0, spec.r, side);
  auto i_out = [&](double d) { return subtract(fatten(ctx, i_r, d), b_r); };
  auto i_in = [&](double d) { return intersect(fatten(ctx, i_r, d), b_r); };

  if (spec.kind == CylinderKind::iv || spec.kind == CylinderKind::v) {
    const Levels w = plus ? sup_levels(g, spec.t0, spec.s2) : sup_levels(g, spec.s1, spec.t0);
    const Levels li = plus ? forward_levels(g, spec.t0, spec.s2) : backward_levels(g, spec.s1, spec.t0);
    const int n_t0 = g.nearest_level(spec.t0);
    const auto b_rt = labelled_ball(ctx, spec.x0, spec.r_tilde, side);
    const auto out = i_out(gap);
    if (b_r.empty()) rec.empty = true;
    rec.lhs = sup_sum(u, b_r, w_same, w, tr);
    rec.free_terms = sup_sum(u, b_rt, w_same, {n_t0, n_t0}, tr) + sup_sum(u, out, w_other, w, tr);
    rec.rhs = inv_gap2 * int_sum(u, unite(b_rt, out), ctx.lambda, li, tr);
    rec.implied_gamma = ratio(std::max(0.0, rec.lhs - rec.free_terms), rec.rhs);
    return rec;
  }

  const double sig = spec.sigma(spec.theta);
  const double sig_t = spec.sigma(spec.theta_tilde);
  const Levels late = plus ? sup_levels(g, spec.t0 + sig, spec.s2) : sup_levels(g, spec.s1, spec.t0 - sig);
  const Levels early = plus ? sup_levels(g, spec.t0, spec.t0 + sig_t) : sup_levels(g, spec.t0 - sig_t, spec.t0);

  const CylinderPieces q = q_sets(ctx, spec, spec.r, spec.theta, spec.eps);
  if (q.late_cells.empty() && q.early_cells.empty()) {
    rec.empty = true;
    return rec;
  }
  rec.lhs = sup_sum(u, labelled_ball(ctx, spec.x0, spec.r + spec.eps, side), w_same, late, tr) +
            sup_sum(u, i_out(spec.eps), w_other, early, tr) + over_pieces(u, q, ctx.lambda, tr, true);

  std::vector<double> cw(g.num_cells());
  const double scale = 1.0 / (spec.beta * spec.h);
  for (int c = 0; c < g.num_cells(); ++c) cw[c] = w_same[c] * scale + ctx.lambda[c];
  const CylinderPieces q2 = q_sets(ctx, spec, spec.r, spec.theta_tilde, gap + spec.eps);
  rec.rhs = sup_sum(u, i_in(gap + spec.eps), w_same, early, tr) +
            sup_sum(u, i_out(gap + spec.eps), w_other, late, tr) +
            inv_gap2 * over_pieces(u, q2, cw, tr, false);
  rec.implied_gamma = ratio(rec.lhs, rec.rhs);
  return rec;
}

DgSweep default_sweep(const GridDomain& grid) {
  DgSweep s;
  const auto o = grid.origin();
  const auto e = grid.extent();
  double side = e[0];
  if (grid.dim() == 2) side = std::min(side, e[1]);
  s.radii = {0.25 * side};
  const double fr[] = {0.3, 0.5, 0.7};
  if (grid.dim() == 1) {
    for (double a : fr) s.centers.push_back({o[0] + a * e[0], 0.0});
  } else {
    s.centers.push_back({o[0] + 0.5 * e[0], o[1] + 0.5 * e[1]});
    for (double a : {0.3, 0.7})
      for (double b : {0.3, 0.7}) s.centers.push_back({o[0] + a * e[0], o[1] + b * e[1]});
  }
  return s;
}

EnergyReport gamma_fit(const SpaceTimeField& u, const DgContext& ctx, const DgSweep& sweep) {
  const GridDomain& g = u.grid();
  const double T = g.final_time();
  const double t0 = sweep.t0 < 0.0 ? 0.5 * T : sweep.t0;
  EnergyReport rep;
  bool any_lhs = false;
  double gp = 0.0, gm = 0.0;
  for (const Point& x0 : sweep.centers) {
    for (double R : sweep.radii) {
      if (!g.contains_ball(x0, R)) continue;
      const auto ball = g.ball_cells(x0, R);
      const double h = ctx.h(x0, R);
      const double beta = std::min(sweep.beta, 0.95 * std::min(t0, T - t0) / (h * R * R));
      double mp = 0.0, mm = 0.0, l0 = 0.0;
      for (int c : ball) {
        mp += ctx.mu_plus[c];
        mm += ctx.mu_minus[c];
        l0 += ctx.lambda_zero[c];
      }
      std::vector<CylinderKind> kinds;
      if (mp > 0.0) kinds.insert(kinds.end(), {CylinderKind::plus, CylinderKind::iv});
      if (mm > 0.0) kinds.insert(kinds.end(), {CylinderKind::minus, CylinderKind::v});
      if (l0 > 0.0) kinds.push_back(CylinderKind::zero);

      std::vector<double> vals;
      for (int n = 0; n < g.num_levels(); ++n)
        for (int c : ball) vals.push_back(u(c, n));
      std::sort(vals.begin(), vals.end());
      std::vector<double> ks;
      for (int i = 0; i < sweep.k_levels; ++i) {
        const auto idx = static_cast<std::size_t>((i + 0.5) / sweep.k_levels * vals.size());
        ks.push_back(vals[std::min(idx, vals.size() - 1)]);
      }
      ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

      for (CylinderKind kind : kinds) {
        const double height = beta * h * R * R;
        const auto specs = build_cylinders(ctx, x0, t0, R, beta, kind, sweep.ladder, t0 - height, t0 + height);
        for (const auto& spec : specs)
          for (double k : ks)
            for (int sign : {1, -1}) {
              EnergyRecord rec = energy_sides(u, k, spec, ctx, sign);
              if (rec.empty) continue;
              any_lhs = any_lhs || rec.lhs > 0.0;
              double& slot = sign > 0 ? gp : gm;
              if (rec.implied_gamma > slot) slot = rec.implied_gamma;
              if (rep.worst < 0 || rec.implied_gamma > rep.records[rep.worst].implied_gamma)
                rep.worst = static_cast<int>(rep.records.size());
              rep.records.push_back(rec);
            }
      }
    }
  }
  if (!any_lhs) {
    rep.gamma = rep.gamma_plus = rep.gamma_minus = 1.0;
    return rep;
  }
  rep.gamma_plus = gp;
  rep.gamma_minus = gm;
  rep.gamma = std::max(gp, gm);
  rep.in_dg_plus = std::isfinite(gp);
  rep.in_dg_minus = std::isfinite(gm);
  return rep;
}

LinftyResult linfty_check(const SpaceTimeField& u, const DgContext& ctx, const Point& x0, double t0,
                          double R, double beta, LinftyCase which) {
  const GridDomain& g = u.grid();
  const Truncation abs_t{0.0, 0};
  const auto ball = g.ball_cells(x0, R);
  double mla = 0.0, lam = 0.0, mp = 0.0, mm = 0.0, l0 = 0.0;
  for (int c : ball) {
    mla += ctx.mu_lambda_abs[c];
    lam += ctx.lambda[c];
    mp += ctx.mu_plus[c];
    mm += ctx.mu_minus[c];
    l0 += ctx.lambda_zero[c];
  }
  const double vol = g.cell_volume();
  LinftyResult res;
  CylinderLadder none;
  none.radii = {{0.5, 1.0}};
  none.theta_tilde = {0.0};
  none.eps_fractions = {0.0};

  if (which == LinftyCase::iii) {
    if (!(l0 > 0.0)) throw Error(ErrorKind::PreconditionFailed, "lambda_0(B_R) vanishes");
    const double s1 = t0, s2 = t0 + beta * R * R;
    const auto spec = build_cylinders(ctx, x0, t0, R, beta, CylinderKind::zero, none, s1, s2).front();
    const auto b0 = labelled_ball(ctx, x0, 0.5 * R, Label::zero);
    const Levels sv = sup_levels(g, s1, s2);
    if (!b0.empty() && !sv.empty())
      for (double m : kernels::slice_max(u, b0, sv.n0, sv.n1, abs_t)) res.ess_sup = std::max(res.ess_sup, m);
    const CylinderPieces q = q_sets(ctx, spec, 0.5 * R, 0.0, 0.5 * R);
    const Levels lv = forward_levels(g, s1, s2);
    const double denom = lam * vol * lv.count() * g.dt();
    res.energy = std::sqrt(over_pieces(u, q, ctx.lambda_zero, abs_t, false) / denom);
  } else {
    const bool plus = which == LinftyCase::i;
    if (!((plus ? mp : mm) > 0.0))
      throw Error(ErrorKind::PreconditionFailed, plus ? "mu_+(B_R) vanishes" : "mu_-(B_R) vanishes");
    const CylinderKind kind = plus ? CylinderKind::plus : CylinderKind::minus;
    const auto spec = build_cylinders(ctx, x0, t0, R, beta, kind, none).front();
    const double half = spec.sigma(0.5);
    const Levels sv = plus ? sup_levels(g, t0 + half, spec.s2) : sup_levels(g, spec.s1, t0 - half);
    const auto b = labelled_ball(ctx, x0, 0.5 * R, plus ? Label::plus : Label::minus);
    if (!b.empty() && !sv.empty())
      for (double m : kernels::slice_max(u, b, sv.n0, sv.n1, abs_t)) res.ess_sup = std::max(res.ess_sup, m);
    const Levels full = plus ? forward_levels(g, t0, spec.s2) : backward_levels(g, spec.s1, t0);
    const double len = full.count() * g.dt();
    const CylinderPieces q = q_sets(ctx, spec, 0.5 * R, 0.0, 0.5 * R);
    const auto& mu_s = plus ? ctx.mu_plus : ctx.mu_minus;
    const auto& lam_s = plus ? ctx.lambda_plus : ctx.lambda_minus;
    res.energy = std::sqrt(over_pieces(u, q, mu_s, abs_t, false) / (mla * vol * len) +
                           over_pieces(u, q, lam_s, abs_t, false) / (lam * vol * len));
  }
  res.c_inf = ratio(res.ess_sup, res.energy);
  return res;
}

double c_plus(double gamma, double gamma1, double kappa, double beta) {
  return std::pow(gamma1, 1.0 / kappa) * std::sqrt(1.0 + beta) * std::pow(beta, -0.5 / kappa) *
         std::sqrt(2.0 * gamma + 8.0);
}

double linfty_d(double cp, double kappa, double u0) {
  const double a = (kappa - 1.0) / kappa;
  return 2.0 * std::pow(cp, 1.0 / a) / 3.0 * std::pow(4.0, 2.0 / a + 1.0 / (a * a) + 1.0) * u0;
}

double smallness_threshold(double cp, double kappa, double d) {
  const double a = (kappa - 1.0) / kappa;
  return 3.0 * d * std::pow(cp, -1.0 / a) * std::pow(4.0, -2.0 / a - 1.0 / (a * a) - 1.0);
}

TruncationTrace truncation_iteration_trace(const SpaceTimeField& u, const DgContext& ctx, double k0,
                                           double d, double R, const Point& x0, double t0,
                                           double beta, int terms) {
  const GridDomain& g = u.grid();
  CylinderLadder none;
  none.radii = {{0.5, 1.0}};
  none.theta_tilde = {0.0};
  none.eps_fractions = {0.0};
  const auto spec = build_cylinders(ctx, x0, t0, R, beta, CylinderKind::plus, none).front();
  const auto ball = g.ball_cells(x0, R);
  double mla = 0.0, lam = 0.0;
  for (int c : ball) {
    mla += ctx.mu_lambda_abs[c];
    lam += ctx.lambda[c];
  }
  const double len = forward_levels(g, t0, spec.s2).count() * g.dt();
  const double m_big = mla * g.cell_volume() * len;
  const double l_big = lam * g.cell_volume() * len;

  TruncationTrace tr;
  for (int n = 0; n < terms; ++n) {
    const double kn = k0 + d * (1.0 - std::ldexp(1.0, -n));
    const double rn = 0.5 * R + R * std::ldexp(1.0, -(n + 1));
    const double th = 0.5 * (1.0 - std::pow(4.0, -n));
    const CylinderPieces q = q_sets(ctx, spec, 0.5 * R, th, rn - 0.5 * R);
    const Truncation t{kn, 1};
    const double v2 = over_pieces(u, q, ctx.mu_plus, t, false) / m_big +
                      over_pieces(u, q, ctx.lambda_plus, t, false) / l_big;
    tr.k.push_back(kn);
    tr.r.push_back(rn);
    tr.theta.push_back(th);
    tr.value.push_back(std::sqrt(v2));
    if (n > 0 && tr.value[n] > tr.value[n - 1] * (1.0 + 1e-12)) tr.nonincreasing = false;
  }
  return tr;
}

}  // namespace mixlab
