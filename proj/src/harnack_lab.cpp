#include "mixlab/harnack_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mixlab/error.hpp"

namespace mixlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-9;

struct Range {
  int n0 = 0;
  int n1 = -1;
  bool empty() const { return n1 < n0; }
};

// Closed window [a, b] on the levels.
Range closed(const GridDomain& g, double a, double b) {
  if (b < a) return {};
  const auto [n0, n1] = g.level_window(a, b);
  return {std::max(n0, 0), std::min(n1, g.time_steps())};
}

// Open window (a, b).
Range open(const GridDomain& g, double a, double b) {
  if (!(b > a)) return {};
  const int n0 = static_cast<int>(std::floor(a / g.dt() + kTol)) + 1;
  const int n1 = static_cast<int>(std::ceil(b / g.dt() - kTol)) - 1;
  return {std::max(n0, 0), std::min(n1, g.time_steps())};
}

void require_time(const GridDomain& g, double a, double b, const char* what) {
  if (a < -kTol * g.final_time() || b > g.final_time() * (1.0 + kTol))
    throw Error(ErrorKind::ContainmentFailed, std::string(what) + " window leaves (0,T)");
}

void require_ball(const GridDomain& g, const Point& x, double r) {
  if (!g.contains_ball(x, r)) throw Error(ErrorKind::ContainmentFailed, "ball leaves the domain");
}

double measure(const std::vector<int>& cells, const std::vector<double>& w, double vol) {
  double s = 0.0;
  for (int c : cells) s += w[c];
  return s * vol;
}

// w({u(., n) < k} within cells).
double below(const SpaceTimeField& u, const std::vector<int>& cells, const std::vector<double>& w,
             int n, double k) {
  double s = 0.0;
  for (int c : cells)
    if (u(c, n) < k) s += w[c];
  return s * u.grid().cell_volume();
}

double min_over(const SpaceTimeField& u, const std::vector<int>& cells, Range r) {
  double m = kInf;
  for (int n = r.n0; n <= r.n1; ++n)
    for (int c : cells) m = std::min(m, u(c, n));
  return m;
}

double max_over(const SpaceTimeField& u, const std::vector<int>& cells, Range r) {
  double m = -kInf;
  for (int n = r.n0; n <= r.n1; ++n)
    for (int c : cells) m = std::max(m, u(c, n));
  return m;
}

std::vector<int> full_ball(const DgContext& ctx, const Point& x, double r) {
  auto b = ctx.grid.ball_cells(x, r);
  std::sort(b.begin(), b.end());
  return b;
}

Label side(PositivityCase k) {
  if (k == PositivityCase::plus) return Label::plus;
  if (k == PositivityCase::minus) return Label::minus;
  return Label::zero;
}

const std::vector<double>& side_weight(const DgContext& ctx, PositivityCase k) {
  if (k == PositivityCase::plus) return ctx.mu_plus;
  if (k == PositivityCase::minus) return ctx.mu_minus;
  if (k == PositivityCase::zero) return ctx.lambda_zero;
  return ctx.mu_lambda_abs;
}

void seed(const SpaceTimeField& u, const std::vector<int>& cells, Range r, double h) {
  if (cells.empty()) throw Error(ErrorKind::PreconditionFailed, "seed set is empty");
  if (min_over(u, cells, r) < h)
    throw Error(ErrorKind::SeedConditionFailed, "u < h somewhere on the seed set");
}

void need_growth(double inner, double outer) {
  if (!(outer > inner && inner > 0.0))
    throw Error(ErrorKind::PreconditionFailed, "weight of B_rho and B_4rho does not grow");
}

double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num > 0.0 ? kInf : 1.0;
}

void nonnegative(double v) {
  if (v < 0.0) throw Error(ErrorKind::NonPositiveField, "u takes negative values on the query set");
}

}  // namespace

std::string to_string(PositivityCase c) {
  switch (c) {
    case PositivityCase::plus: return "plus";
    case PositivityCase::minus: return "minus";
    case PositivityCase::zero: return "zero";
    case PositivityCase::omega0: return "omega0";
  }
  return "?";
}

std::string to_string(HarnackCase c) {
  switch (c) {
    case HarnackCase::i: return "i";
    case HarnackCase::ii: return "ii";
    case HarnackCase::iii: return "iii";
    case HarnackCase::iv: return "iv";
    case HarnackCase::mixed: return "mixed";
  }
  return "?";
}

std::string to_string(MaxVerdict v) {
  switch (v) {
    case MaxVerdict::not_applicable: return "NOT_APPLICABLE";
    case MaxVerdict::constant: return "CONSTANT";
    case MaxVerdict::violation: return "VIOLATION";
  }
  return "?";
}

ShrinkResult level_set_shrink_check(const SpaceTimeField& u, const DgContext& ctx,
                                    const PositivityQuery& q, double eta, double q_doubling) {
  const GridDomain& g = ctx.grid;
  require_ball(g, q.x, 4.0 * q.rho);
  const double H = ctx.h(q.x, 4.0 * q.rho) * q.rho * q.rho;
  const int ns = g.nearest_level(q.t);
  const double vol = g.cell_volume();
  const double k = eta * q.h_level;
  ShrinkResult out;
  out.bound = 1.0 - 0.5 / (q_doubling * q_doubling);

  if (q.kind == PositivityCase::omega0) {
    require_time(g, q.t - q.beta * H, q.t + q.beta * H, "shrinking");
    const auto small = full_ball(ctx, q.x, q.rho), big = full_ball(ctx, q.x, 4.0 * q.rho);
    seed(u, small, {ns, ns}, q.h_level);
    const auto& w = ctx.mu_lambda_abs;
    const double total = measure(big, w, vol);
    need_growth(measure(small, w, vol), total);
    const auto bp = ctx.ball(q.x, 4.0 * q.rho, Label::plus);
    const auto bm = ctx.ball(q.x, 4.0 * q.rho, Label::minus);
    const auto b0 = ctx.ball(q.x, 4.0 * q.rho, Label::zero);
    double ap = 0.0, am = 0.0;
    const Range fw = closed(g, q.t, q.t + q.beta_tilde * H);
    for (int n = fw.n0; n <= fw.n1; ++n) ap = std::max(ap, below(u, bp, w, n, k));
    const Range bw = closed(g, q.t - q.beta_tilde * H, q.t);
    for (int n = bw.n0; n <= bw.n1; ++n) am = std::max(am, below(u, bm, w, n, k));
    out.levels = {ns};
    out.ratios = {(ap + am + below(u, b0, w, ns, k)) / total};
    out.worst = out.ratios[0];
    out.annulus_fraction = 1.0 - measure(small, w, vol) / total;
    out.passes = out.worst <= out.bound;
    return out;
  }

  const Label s = side(q.kind);
  const auto& w = side_weight(ctx, q.kind);
  const auto small = ctx.ball(q.x, q.rho, s), big = ctx.ball(q.x, 4.0 * q.rho, s);
  const double total = measure(big, w, vol), inner = measure(small, w, vol);
  need_growth(inner, total);
  seed(u, small, {ns, ns}, q.h_level);
  Range r{ns, ns};
  if (q.kind != PositivityCase::zero) {
    require_time(g, q.t - q.beta * H, q.t + q.beta * H, "shrinking");
    r = q.kind == PositivityCase::plus ? closed(g, q.t, q.t + q.beta_tilde * H)
                                       : closed(g, q.t - q.beta_tilde * H, q.t);
  }
  for (int n = r.n0; n <= r.n1; ++n) {
    out.levels.push_back(n);
    out.ratios.push_back(below(u, big, w, n, k) / total);
    out.worst = std::max(out.worst, out.ratios.back());
  }
  out.annulus_fraction = 1.0 - inner / total;
  out.passes = out.worst <= out.bound;
  return out;
}

EtaLadder shrink_eta_ladder(const SpaceTimeField& u, const DgContext& ctx, const PositivityQuery& q,
                            double q_doubling, int rungs) {
  EtaLadder out;
  for (int m = 1; m <= rungs; ++m) {
    const double eta = std::ldexp(1.0, -m);
    const auto r = level_set_shrink_check(u, ctx, q, eta, q_doubling);
    out.rungs.emplace_back(eta, r.worst);
    if (r.passes && out.eta == 0.0) out.eta = eta;
  }
  return out;
}

MeasureShrink shrink_in_measure_check(const SpaceTimeField& u, const DgContext& ctx,
                                      const PositivityQuery& q, double eps, double eta,
                                      double kappa, double tau, int rungs) {
  const GridDomain& g = ctx.grid;
  require_ball(g, q.x, 5.0 * q.rho);
  const double H = ctx.h(q.x, 4.0 * q.rho) * q.rho * q.rho;
  require_time(g, q.t - q.beta * H, q.t + q.beta * H, "shrinking in measure");
  const int ns = g.nearest_level(q.t);
  const double vol = g.cell_volume();
  const auto big = full_ball(ctx, q.x, 4.0 * q.rho);

  Range r;
  std::vector<int> cells = big;
  const std::vector<double>* w_mu = &ctx.mu_lambda_abs;
  const std::vector<double>* w_lam = &ctx.lambda;
  std::vector<int> seed_cells;
  Range seed_range{ns, ns};
  switch (q.kind) {
    case PositivityCase::plus:
      r = closed(g, q.t, q.t + q.beta_tilde * H);
      cells = ctx.ball(q.x, 4.0 * q.rho, Label::plus);
      w_mu = &ctx.mu_plus;
      w_lam = &ctx.lambda_plus;
      seed_cells = ctx.ball(q.x, q.rho, Label::plus);
      break;
    case PositivityCase::minus:
      r = closed(g, q.t - q.beta_tilde * H, q.t);
      cells = ctx.ball(q.x, 4.0 * q.rho, Label::minus);
      w_mu = &ctx.mu_minus;
      w_lam = &ctx.lambda_minus;
      seed_cells = ctx.ball(q.x, q.rho, Label::minus);
      break;
    case PositivityCase::zero:
      r = closed(g, q.t - q.beta * H, q.t + q.beta * H);
      cells = ctx.ball(q.x, 4.0 * q.rho, Label::zero);
      w_mu = &ctx.lambda_zero;
      seed_cells = ctx.ball(q.x, q.rho, Label::zero);
      seed_range = r;
      break;
    case PositivityCase::omega0:
      r = closed(g, q.t - q.beta * H, q.t + q.beta * H);
      w_mu = &ctx.lambda;
      seed_cells = full_ball(ctx, q.x, q.rho);
      seed_range = r;
      break;
  }

  MeasureShrink out;
  out.seed_holds = !seed_cells.empty() && min_over(u, seed_cells, seed_range) >= q.h_level;
  const bool slicewise = q.kind == PositivityCase::omega0;
  const int levels = r.empty() ? 0 : r.n1 - r.n0 + 1;
  const double ref_mu = measure(big, q.kind == PositivityCase::zero ? ctx.lambda : ctx.mu_lambda_abs, vol);
  out.reference = slicewise ? measure(big, ctx.lambda, vol) : ref_mu * levels * g.dt();
  out.lambda_reference = measure(big, ctx.lambda, vol) * levels * g.dt();
  const bool with_lambda = kappa > 0.0 &&
                           (q.kind == PositivityCase::plus || q.kind == PositivityCase::minus);

  for (int m = 0; m <= rungs; ++m) {
    const double k = std::ldexp(eta, -m) * q.h_level;
    double mu_part = 0.0, lam_part = 0.0;
    for (int n = r.n0; n <= r.n1; ++n) {
      const double a = below(u, cells, *w_mu, n, k);
      if (slicewise)
        mu_part = std::max(mu_part, a);
      else
        mu_part += a * g.dt();
      if (with_lambda) lam_part += below(u, cells, *w_lam, n, k) * g.dt();
    }
    bool ok = mu_part <= eps * out.reference;
    if (with_lambda) ok = ok && lam_part <= kappa * std::pow(eps, tau) * out.lambda_reference;
    if (ok) {
      out.m = m;
      out.eta1 = std::ldexp(eta, -m);
      out.measure = mu_part;
      out.lambda_measure = lam_part;
      return out;
    }
  }
  throw Error(ErrorKind::LadderExhausted, "no eta1 on the ladder reaches the requested smallness");
}

Expansion expansion_of_positivity_check(const SpaceTimeField& u, const DgContext& ctx,
                                        const PositivityQuery& q) {
  const GridDomain& g = ctx.grid;
  require_ball(g, q.x, 5.0 * q.rho);
  const double H = ctx.h(q.x, 4.0 * q.rho) * q.rho * q.rho;
  const int ns = g.nearest_level(q.t);
  const double vol = g.cell_volume();
  std::vector<int> target;
  Range r;
  switch (q.kind) {
    case PositivityCase::plus:
    case PositivityCase::minus: {
      require_time(g, q.t - 16.0 * H, q.t + 16.0 * H, "expansion");
      const Label s = side(q.kind);
      const auto small = ctx.ball(q.x, q.rho, s);
      if (measure(small, side_weight(ctx, q.kind), vol) <= 0.0)
        throw Error(ErrorKind::PreconditionFailed, "no signed mass in B_rho");
      seed(u, small, {ns, ns}, q.h_level);
      target = ctx.ball(q.x, 2.0 * q.rho, s);
      const double a = q.theta_hat * q.beta_tilde * H, b = q.beta_tilde * H;
      r = q.kind == PositivityCase::plus ? closed(g, q.t + a, q.t + b) : closed(g, q.t - b, q.t - a);
      break;
    }
    case PositivityCase::zero: {
      require_time(g, q.t - q.beta * H, q.t + q.beta * H, "expansion");
      const auto small = ctx.ball(q.x, q.rho, Label::zero);
      if (measure(small, ctx.lambda_zero, vol) <= 0.0)
        throw Error(ErrorKind::PreconditionFailed, "B_rho misses the zero set");
      r = closed(g, q.t - q.beta * H, q.t + q.beta * H);
      seed(u, small, r, q.h_level);
      target = ctx.ball(q.x, 2.0 * q.rho, Label::zero);
      break;
    }
    case PositivityCase::omega0: {
      for (int c : g.ball_cells(q.x, 5.0 * q.rho))
        if (ctx.part.labels[c] != Label::zero)
          throw Error(ErrorKind::ContainmentFailed, "B_5rho is not inside the zero set");
      r = {ns, ns};
      seed(u, full_ball(ctx, q.x, q.rho), r, q.h_level);
      target = full_ball(ctx, q.x, 2.0 * q.rho);
      break;
    }
  }
  if (target.empty() || r.empty()) throw Error(ErrorKind::PreconditionFailed, "empty target set");
  Expansion out;
  out.target_cells = static_cast<int>(target.size());
  out.n0 = r.n0;
  out.n1 = r.n1;
  const double m = min_over(u, target, r);
  out.min_ratio = m / q.h_level;
  for (int k = 1; k <= 20; ++k) {
    if (m >= std::ldexp(q.h_level, -k)) {
      out.rung = k;
      out.lambda_hat = std::ldexp(1.0, -k);
      return out;
    }
  }
  throw Error(ErrorKind::NoPositiveLambda, "u falls below 2^-20 h on the target set");
}

HarnackReport harnack_constant(const SpaceTimeField& u, const DgContext& ctx, const HarnackQuery& q) {
  if (q.kind == HarnackCase::mixed) return harnack_mixed(u, ctx, q);
  const GridDomain& g = ctx.grid;
  require_ball(g, q.x, 5.0 * q.rho);
  HarnackReport out;
  out.h_rho = ctx.h(q.x, q.rho);
  out.h_4rho = ctx.h(q.x, 4.0 * q.rho);
  const double r2 = q.rho * q.rho;
  const int xc = g.nearest_cell(q.x);
  const int nt = g.nearest_level(q.t);
  out.value_at_point = u(xc, nt);
  nonnegative(out.value_at_point);

  auto on_side = [&](Label s, const char* name) {
    if (!ctx.part.in_closure(xc, s))
      throw Error(ErrorKind::PreconditionFailed, std::string("point is not in the closure of ") + name);
  };
  std::vector<int> cells;
  Range r;
  switch (q.kind) {
    case HarnackCase::i: {
      on_side(Label::plus, "Omega+");
      require_time(g, q.t - out.h_rho * r2, q.t + 16.0 * out.h_4rho * r2 + q.theta * out.h_rho * r2,
                   "Harnack");
      cells = ctx.ball(q.x, q.rho, Label::plus);
      const int n = g.nearest_level(q.t + q.theta * r2 * out.h_rho);
      r = {n, n};
      out.target = "B+_rho at t + theta rho^2 h(x,rho)";
      break;
    }
    case HarnackCase::ii: {
      on_side(Label::minus, "Omega-");
      require_time(g, q.t - 16.0 * out.h_4rho * r2 - q.theta * out.h_rho * r2, q.t + out.h_rho * r2,
                   "Harnack");
      cells = ctx.ball(q.x, q.rho, Label::minus);
      const int n = g.nearest_level(q.t - q.theta * r2 * out.h_rho);
      r = {n, n};
      out.target = "B-_rho at t - theta rho^2 h(x,rho)";
      break;
    }
    case HarnackCase::iii: {
      on_side(Label::zero, "Omega0");
      if (!(q.omega > 0.0 && q.omega <= 16.0))
        throw Error(ErrorKind::InvalidInput, "omega must lie in (0, 16]");
      require_time(g, q.t - 16.0 * out.h_4rho * r2, q.t + 16.0 * out.h_4rho * r2, "Harnack");
      const double w = q.omega * out.h_4rho * r2;
      r = closed(g, q.t - w, q.t + w);
      cells = ctx.ball(q.x, q.rho, Label::plus);
      out.target = "B+_rho x [s1, s2]";
      if (cells.empty()) {
        cells = ctx.ball(q.x, q.rho, Label::zero);
        out.target = "B0_rho x [s1, s2]";
      }
      break;
    }
    case HarnackCase::iv: {
      for (int c : g.ball_cells(q.x, 5.0 * q.rho))
        if (ctx.part.labels[c] != Label::zero)
          throw Error(ErrorKind::ContainmentFailed, "B_5rho is not inside the zero set");
      cells = full_ball(ctx, q.x, q.rho);
      r = {nt, nt};
      out.target = "B_rho at t";
      break;
    }
    case HarnackCase::mixed: break;
  }
  if (cells.empty() || r.empty()) throw Error(ErrorKind::PreconditionFailed, "empty target set");
  out.target_cells = static_cast<int>(cells.size());
  out.n0 = r.n0;
  out.n1 = r.n1;
  out.inf_over_target = min_over(u, cells, r);
  out.sup_over_target = max_over(u, cells, r);
  nonnegative(out.inf_over_target);
  const bool sup_form = q.kind == HarnackCase::iii || q.kind == HarnackCase::iv;
  out.ratio = safe_ratio(sup_form ? out.sup_over_target : out.value_at_point, out.inf_over_target);
  return out;
}

HarnackReport harnack_mixed(const SpaceTimeField& u, const DgContext& ctx, const HarnackQuery& q) {
  const GridDomain& g = ctx.grid;
  const int xc = g.nearest_cell(q.x);
  if (!ctx.part.in_interface[xc]) throw Error(ErrorKind::NotOnInterface, "point is not on I");
  require_ball(g, q.x, 5.0 * q.rho);
  HarnackReport out;
  out.h_rho = ctx.h(q.x, q.rho);
  out.h_4rho = ctx.h(q.x, 4.0 * q.rho);
  const double r2 = q.rho * q.rho;
  const double wide = 16.0 * out.h_4rho * r2 + q.theta * out.h_rho * r2;
  require_time(g, q.t - wide, q.t + wide, "Harnack");
  const int nt = g.nearest_level(q.t);
  const int up = g.nearest_level(q.t + q.theta * out.h_rho * r2);
  const int down = g.nearest_level(q.t - q.theta * out.h_rho * r2);
  out.value_at_point = u(xc, nt);
  nonnegative(out.value_at_point);

  out.target = "I";
  if (ctx.part.in_plus_interface[xc]) out.target += "+";
  if (ctx.part.in_minus_interface[xc]) out.target += "-";
  if (ctx.part.in_zero_interface[xc]) out.target += "0";

  const auto ball = full_ball(ctx, q.x, q.rho);
  double inf_t = kInf, sup_rev = -kInf, inf_now = kInf;
  for (int c : ball) {
    const Label s = ctx.part.labels[c];
    const int fwd = s == Label::plus ? up : s == Label::minus ? down : nt;
    const int rev = s == Label::plus ? down : s == Label::minus ? up : nt;
    inf_t = std::min(inf_t, u(c, fwd));
    sup_rev = std::max(sup_rev, u(c, rev));
    inf_now = std::min(inf_now, u(c, nt));
  }
  nonnegative(inf_t);
  nonnegative(inf_now);
  out.target_cells = static_cast<int>(ball.size());
  out.n0 = std::min(down, up);
  out.n1 = std::max(down, up);
  out.inf_over_target = inf_t;
  out.sup_over_target = sup_rev;
  out.ratio = safe_ratio(out.value_at_point, inf_t);
  out.reversed_ratio = safe_ratio(sup_rev, inf_now);
  return out;
}

double holder_alpha(double gamma) {
  const double g = std::max(gamma, 2.0);
  return std::log2(g / (g - 1.0));
}

HolderFit holder_exponent(const SpaceTimeField& u, const DgContext& ctx, const Point& x, double t,
                          const std::vector<double>& radii, double gamma) {
  if (radii.size() < 4) throw Error(ErrorKind::InsufficientLadder, "need at least four radii");
  const GridDomain& g = ctx.grid;
  HolderFit fit;
  fit.alpha_from_gamma = holder_alpha(gamma);
  std::vector<double> lx, ly;
  for (double r : radii) {
    require_ball(g, x, r);
    const double w = r * r * ctx.h(x, r);
    require_time(g, t - w, t + w, "oscillation");
    Range lv = closed(g, t - w, t + w);
    if (lv.empty()) lv = {g.nearest_level(t), g.nearest_level(t)};
    const auto cells = full_ball(ctx, x, r);
    const double osc = max_over(u, cells, lv) - min_over(u, cells, lv);
    fit.rho.push_back(r);
    fit.osc.push_back(osc);
    fit.window.push_back(w);
    if (osc > 0.0) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(osc));
    }
  }
  if (lx.size() < 2) {
    fit.alpha = kInf;
    fit.capped = true;
    return fit;
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw Error(ErrorKind::InsufficientLadder, "radii must differ");
  fit.alpha = sxy / sxx;
  fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

std::string holder_csv(const HolderFit& fit) {
  std::string s = "rho,osc,window\n";
  char buf[128];
  for (std::size_t i = 0; i < fit.rho.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", fit.rho[i], fit.osc[i], fit.window[i]);
    s += buf;
  }
  return s;
}

MaxPrinciple max_principle_check(const SpaceTimeField& u, const DgContext& ctx, const Point& x,
                                 double t, double theta, double rho, double tol) {
  const GridDomain& g = ctx.grid;
  MaxPrinciple out;
  if (!g.contains_ball(x, rho)) {
    out.reason = "ball leaves the domain";
    return out;
  }
  double hmax = g.cell_size(0);
  if (g.dim() == 2) hmax = std::max(hmax, g.cell_size(1));
  if (rho < 1.5 * hmax) {
    out.reason = "ball narrower than the stencil";
    return out;
  }
  const double w = theta * ctx.h(x, rho) * rho * rho;
  if (t - w < 0.0 || t + w > g.final_time() * (1.0 + kTol)) {
    out.reason = "time window leaves (0,T)";
    return out;
  }
  const int nt = g.nearest_level(t);
  const auto bp = ctx.ball(x, rho, Label::plus);
  const auto bm = ctx.ball(x, rho, Label::minus);
  const auto b0 = ctx.ball(x, rho, Label::zero);
  const Range around = open(g, t - w, t + w);
  if ((!bp.empty() && open(g, t - w, t).n0 >= nt) || (!bm.empty() && open(g, t, t + w).n1 <= nt)) {
    out.reason = "time window holds no level besides t";
    return out;
  }
  out.value = u(g.nearest_cell(x), nt);
  out.neighborhood_max = std::max({max_over(u, bp, around), max_over(u, bm, around),
                                   max_over(u, b0, {nt, nt})});
  if (out.value < out.neighborhood_max - tol) {
    out.reason = "not a maximum point of the neighbourhood";
    return out;
  }
  const Range past{open(g, t - w, t).n0, nt};
  const Range future{nt, open(g, t, t + w).n1};
  auto scan = [&](const std::vector<int>& cells, Range r) {
    for (int n = r.n0; n <= r.n1; ++n)
      for (int c : cells) {
        const double d = std::abs(u(c, n) - out.value);
        if (d > out.deviation) {
          out.deviation = d;
          out.witness_cell = c;
          out.witness_level = n;
        }
      }
  };
  scan(bp, past);
  scan(b0, {nt, nt});
  scan(bm, future);
  out.verdict = out.deviation > tol ? MaxVerdict::violation : MaxVerdict::constant;
  if (out.verdict == MaxVerdict::constant) {
    out.witness_cell = -1;
    out.witness_level = -1;
  }
  return out;
}

}  // namespace mixlab
