#include "mixlab/weight_lab.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mixlab/error.hpp"

namespace mixlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (mass ratio a, reference ratio b) pairs for sampled subsets of one ball.
using Pairs = std::vector<std::pair<double, double>>;

// Subsets of the ball's cells: prefixes of `order`, halves, and random unions.
template <class Add>
void sample_subsets(const GridDomain& g, const Ball& ball, const std::vector<int>& cells,
                    const std::vector<int>& order, int samples, std::mt19937_64& rng, Add&& add) {
  const int m = static_cast<int>(cells.size());
  std::vector<int> subset;
  for (int k = 1; k <= m; ++k) {
    subset.assign(order.begin(), order.begin() + k);
    add(subset);
  }
  for (int axis = 0; axis < g.dim(); ++axis) {
    std::vector<int> lo, hi;
    for (int c : cells) {
      const Point p = g.center(c);
      const double v = axis == 0 ? p.x - ball.center.x : p.y - ball.center.y;
      (v < 0.0 ? lo : hi).push_back(c);
    }
    if (!lo.empty()) add(lo);
    if (!hi.empty()) add(hi);
  }
  std::vector<int> pool = cells;
  for (int k : {1, m / 4, m / 2}) {
    if (k < 1) continue;
    for (int s = 0; s < samples; ++s) {
      std::shuffle(pool.begin(), pool.end(), rng);
      subset.assign(pool.begin(), pool.begin() + k);
      add(subset);
    }
  }
}

struct ExponentFit {
  double K = 1.0;
  double exponent = 1.0;
  std::size_t witness = 0;
  bool within_cap = true;
};

// For each exponent e: K(e) = max a / b^e over all pairs of all balls.
ExponentFit fit_exponent(const std::vector<Pairs>& per_ball, double cap) {
  const auto grid = exponent_grid();
  const long nb = static_cast<long>(per_ball.size());
  std::vector<double> table(per_ball.size() * grid.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 2) if (nb > 4)
  for (long b = 0; b < nb; ++b) {
    for (std::size_t e = 0; e < grid.size(); ++e) {
      double k = 0.0;
      for (const auto& [a, r] : per_ball[b]) {
        if (a <= 0.0) continue;
        const double v = r > 0.0 ? a / std::pow(r, grid[e]) : kInf;
        k = std::max(k, std::isnan(v) ? kInf : v);
      }
      table[b * grid.size() + e] = k;
    }
  }
  ExponentFit best;
  best.within_cap = false;
  for (std::size_t e = 0; e < grid.size(); ++e) {
    double k = 0.0;
    std::size_t w = 0;
    for (std::size_t b = 0; b < per_ball.size(); ++b) {
      if (table[b * grid.size() + e] > k) {
        k = table[b * grid.size() + e];
        w = b;
      }
    }
    k = std::max(k, 1.0);
    if (k <= cap * (1.0 + 1e-9)) return {k, grid[e], w, true};
    best = {k, grid[e], w, false};
  }
  return best;
}

std::vector<double> ones(const GridDomain& g) { return std::vector<double>(g.num_cells(), 1.0); }

void require_positive(const WeightField& w, const std::vector<Ball>& balls) {
  std::vector<char> seen(w.size(), 0);
  for (const Ball& b : balls)
    for (int c : w.grid().ball_cells(b.center, b.radius)) {
      if (seen[c]) continue;
      seen[c] = 1;
      if (!(w[c] > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "weight vanishes on a sampled ball");
    }
}

}  // namespace

std::vector<double> exponent_grid() {
  std::vector<double> g;
  for (int k = 100; k >= 1; --k) g.push_back(k / 100.0);
  return g;
}

BallFamily BallFamily::dyadic(std::vector<Point> centers, double r_min, double r_max) {
  if (!(r_min > 0.0) || r_max < 2.0 * r_min * (1.0 - 1e-12))
    throw Error(ErrorKind::InvalidInput, "a ball family needs at least two radii");
  BallFamily f;
  f.centers = std::move(centers);
  for (double r = r_min; r <= r_max * (1.0 + 1e-12); r *= 2.0) f.radii.push_back(r);
  return f;
}

void BallFamily::add_random_nodes(const GridDomain& grid, int count, std::uint64_t seed,
                                  std::optional<std::array<double, 4>> box) {
  const auto o = grid.origin();
  const auto e = grid.extent();
  std::array<double, 4> b = box.value_or(std::array<double, 4>{o[0], o[1], o[0] + e[0], o[1] + e[1]});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(b[0], b[2]), uy(b[1], b[3]);
  for (int k = 0; k < count; ++k) {
    const double hx = grid.cell_size(0), hy = grid.cell_size(1);
    Point p;
    p.x = o[0] + std::round((ux(rng) - o[0]) / hx) * hx;
    p.y = grid.dim() == 2 ? o[1] + std::round((uy(rng) - o[1]) / hy) * hy : 0.0;
    centers.push_back(p);
  }
}

std::vector<Point> BallFamily::usable_centers() const {
  std::vector<Point> out;
  for (const Point& p : centers) {
    if (restriction) {
      const auto& r = *restriction;
      if (p.x < r[0] || p.x > r[2] || p.y < r[1] || p.y > r[3]) continue;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<Ball> BallFamily::balls() const {
  std::vector<Ball> out;
  for (const Point& p : usable_centers())
    for (double r : radii) out.push_back({p, r});
  return out;
}

Measured ap_constant(const WeightField& w, double p, const BallFamily& family) {
  if (!(p > 1.0)) throw Error(ErrorKind::BadExponents, "A_p needs p > 1");
  const auto balls = family.balls();
  if (balls.empty()) throw Error(ErrorKind::EmptyFamily, "no balls to sample");
  require_positive(w, balls);
  const GridDomain& g = w.grid();
  const auto one = ones(g);
  std::vector<double> dual(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) dual[c] = std::pow(w[c], -1.0 / (p - 1.0));
  const auto s = kernels::ball_integrals(g, balls, {&one, &w.values(), &dual});
  Measured out;
  out.family_size = balls.size();
  for (std::size_t b = 0; b < balls.size(); ++b) {
    const double vol = s[3 * b];
    if (vol <= 0.0) continue;
    const double v = std::pow(s[3 * b + 1] / vol, 1.0 / p) *
                     std::pow(s[3 * b + 2] / vol, (p - 1.0) / p);
    if (v > out.value) {
      out.value = v;
      out.witness = balls[b];
    }
  }
  if (out.value == 0.0) throw Error(ErrorKind::EmptyFamily, "every sampled ball is empty");
  return out;
}

AInfty a_infty_params(const WeightField& w, const BallFamily& family, int subset_samples,
                      std::uint64_t seed, double k_cap) {
  if (subset_samples < 1) throw Error(ErrorKind::InvalidInput, "subset_samples must be >= 1");
  const auto balls = family.balls();
  if (balls.empty()) throw Error(ErrorKind::EmptyFamily, "no balls to sample");
  require_positive(w, balls);
  const GridDomain& g = w.grid();
  std::vector<Pairs> per_ball(balls.size());
  const long nb = static_cast<long>(balls.size());
#pragma omp parallel for schedule(dynamic, 2) if (nb > 4)
  for (long b = 0; b < nb; ++b) {
    const auto cells = g.ball_cells(balls[b].center, balls[b].radius);
    if (cells.empty()) continue;
    double total = 0.0;
    for (int c : cells) total += w[c];
    std::vector<int> order = cells;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return w[x] > w[y]; });
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(b + 1));
    const double m = static_cast<double>(cells.size());
    sample_subsets(g, balls[b], cells, order, subset_samples, rng, [&](const std::vector<int>& s) {
      double ws = 0.0;
      for (int c : s) ws += w[c];
      per_ball[b].push_back({ws / total, s.size() / m});
    });
  }
  const ExponentFit fit = fit_exponent(per_ball, k_cap);
  AInfty out;
  out.K = fit.K;
  out.varsigma = fit.exponent;
  out.witness = balls[fit.witness];
  out.family_size = balls.size();
  out.within_cap = fit.within_cap;
  return out;
}

namespace {

Measured doubling_of(const std::vector<double>& values, const GridDomain& g,
                     const std::vector<Ball>& balls) {
  std::vector<Ball> both;
  for (const Ball& b : balls) {
    both.push_back(b);
    both.push_back({b.center, 2.0 * b.radius});
  }
  const auto s = kernels::ball_integrals(g, both, {&values});
  Measured out;
  out.value = 0.0;
  out.family_size = balls.size();
  for (std::size_t b = 0; b < balls.size(); ++b) {
    const double small = s[2 * b], big = s[2 * b + 1];
    if (big <= 0.0) continue;
    const double v = small > 0.0 ? big / small : kInf;
    if (v > out.value) {
      out.value = v;
      out.witness = balls[b];
    }
  }
  return out;
}

}  // namespace

Measured doubling_constant(const WeightField& w, const BallFamily& family) {
  const auto balls = family.balls();
  if (balls.empty()) throw Error(ErrorKind::EmptyFamily, "no balls to sample");
  for (const Ball& b : balls)
    if (!w.grid().contains_ball(b.center, 2.0 * b.radius))
      throw Error(ErrorKind::BallEscapesDomain, "doubled ball leaves the domain");
  return doubling_of(w.values(), w.grid(), balls);
}

ReverseHolder reverse_holder_fit(const WeightField& w, const BallFamily& family,
                                 const std::vector<double>& delta_grid, double p, double c_cap) {
  if (!(p > 1.0)) throw Error(ErrorKind::BadExponents, "reverse Hölder needs p > 1");
  const auto balls = family.balls();
  if (balls.empty()) throw Error(ErrorKind::EmptyFamily, "no balls to sample");
  for (const Ball& b : balls)
    for (int c : w.grid().ball_cells(b.center, b.radius))
      if (w[c] < 0.0) throw Error(ErrorKind::NonPositiveWeight, "negative weight on a sampled ball");
  const GridDomain& g = w.grid();
  std::vector<double> deltas = delta_grid;
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  const auto one = ones(g);
  std::vector<double> dual(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) dual[c] = std::pow(w[c], -1.0 / (p - 1.0));
  for (double d : deltas) {
    std::vector<double> wp(g.num_cells()), dp(g.num_cells());
    for (int c = 0; c < g.num_cells(); ++c) {
      wp[c] = std::pow(w[c], 1.0 + d);
      dp[c] = std::pow(dual[c], 1.0 + d);
    }
    const auto s = kernels::ball_integrals(g, balls, {&one, &w.values(), &wp, &dual, &dp});
    ReverseHolder r;
    r.delta = d;
    r.c_rh = 1.0;
    r.family_size = balls.size();
    bool ok = true;
    for (std::size_t b = 0; b < balls.size() && ok; ++b) {
      const double vol = s[5 * b];
      if (vol <= 0.0) continue;
      const double first = std::pow(s[5 * b + 2] / vol, 1.0 / (1.0 + d)) / (s[5 * b + 1] / vol);
      const double second = std::pow(s[5 * b + 4] / vol, 1.0 / (1.0 + d)) / (s[5 * b + 3] / vol);
      const double v = std::max(first, second);
      if (!std::isfinite(first) || !std::isfinite(second)) ok = false;
      else if (v > r.c_rh) {
        r.c_rh = v;
        r.witness = balls[b];
      }
    }
    if (ok && r.c_rh <= c_cap) return r;
  }
  throw Error(ErrorKind::NoFeasibleDelta, "no delta in the grid keeps c_rh finite and within the cap");
}

Measured pair_condition_constant(const WeightField& nu, const WeightField& omega, double p,
                                 double q, double alpha, const BallFamily& family) {
  if (!(p > 1.0) || p >= q) throw Error(ErrorKind::BadExponents, "pair condition needs 1 < p < q");
  const GridDomain& g = nu.grid();
  const double n = g.dim();
  if (alpha < 0.0 || alpha >= n) throw Error(ErrorKind::BadExponents, "alpha must lie in [0, n)");
  const auto balls = family.balls();
  if (balls.empty()) throw Error(ErrorKind::EmptyFamily, "no balls to sample");
  const auto one = ones(g);
  const auto s = kernels::ball_integrals(g, balls, {&one, &nu.values(), &omega.values()});
  const std::size_t nr = family.radii.size();
  Measured out;
  out.family_size = 0;
  for (std::size_t b0 = 0; b0 < balls.size(); b0 += nr) {
    for (std::size_t i = 0; i < nr; ++i) {
      for (std::size_t j = i + 1; j < nr; ++j) {
        const std::size_t a = b0 + i, b = b0 + j;
        if (s[3 * a] <= 0.0 || s[3 * b] <= 0.0) continue;
        ++out.family_size;
        const double v = std::pow(s[3 * a] / s[3 * b], alpha / n) *
                         std::pow(s[3 * a + 1] / s[3 * b + 1], 1.0 / q) *
                         std::pow(s[3 * a + 2] / s[3 * b + 2], -1.0 / p);
        const double vv = std::isnan(v) ? kInf : v;
        if (vv > out.value) {
          out.value = vv;
          out.witness = balls[a];
        }
      }
    }
  }
  if (out.family_size == 0) throw Error(ErrorKind::EmptyFamily, "no concentric pairs");
  return out;
}

WeightField build_mu_lambda_abs(const WeightField& mu, const WeightField& lambda, double zero_tol) {
  const GridDomain& g = mu.grid();
  for (int c = 0; c < g.num_cells(); ++c)
    if (!(lambda[c] > 0.0)) throw Error(ErrorKind::NonPositiveLambda, "lambda must be positive");
  std::vector<double> v(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c)
    v[c] = std::abs(mu[c]) <= zero_tol ? lambda[c] : std::abs(mu[c]);
  return WeightField(g, std::move(v), WeightKind::mu_lambda_abs);
}

H4Result h4_constant(const WeightField& mu, const WeightField& lambda, const SignPartition& part,
                     const BallFamily& family) {
  const GridDomain& g = mu.grid();
  const auto balls = family.balls();
  if (balls.empty()) throw Error(ErrorKind::EmptyFamily, "no balls to sample");
  for (const Ball& b : balls)
    if (!g.contains_ball(b.center, 2.0 * b.radius))
      throw Error(ErrorKind::BallEscapesDomain, "doubled ball leaves the domain");
  std::vector<double> lambda0(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) lambda0[c] = lambda[c] * mu.zero_fraction()[c];
  struct Line {
    const char* name;
    const std::vector<double>* measure;
    Label label;
  };
  const Line lines[3] = {{"mu_plus", &mu.positive_part(), Label::plus},
                         {"mu_minus", &mu.negative_part(), Label::minus},
                         {"lambda_zero", &lambda0, Label::zero}};
  H4Result out;
  out.q = 1.0;
  for (const Line& line : lines) {
    // Centres in Omega_s ∪ I_s at grid resolution: the nearest cell or a face
    // neighbour carries part of the measure, or the cell lies in the closure by label.
    std::vector<Ball> chosen;
    for (const Ball& b : balls) {
      const int c = g.nearest_cell(b.center);
      bool on = part.in_closure(c, line.label) || (*line.measure)[c] > 0.0;
      for (int d : g.neighbors(c))
        if (d >= 0 && (*line.measure)[d] > 0.0) on = true;
      if (on) chosen.push_back(b);
    }
    if (chosen.empty()) continue;
    const Measured m = doubling_of(*line.measure, g, chosen);
    out.family_size += chosen.size();
    if (m.value > out.q) {
      out.q = m.value;
      out.witness = m.witness;
      out.line = line.name;
    }
  }
  if (out.line.empty()) out.line = "none";
  return out;
}

std::vector<std::pair<double, double>> h5_decay(const SignPartition& part,
                                                const std::vector<double>& eps_list) {
  const GridDomain& g = part.grid;
  const auto faces = part.interface_faces();
  std::vector<std::pair<double, double>> out;
  for (double eps : eps_list) {
    std::vector<char> mark(g.num_cells(), 0);
    if (eps > 0.0)
      for (const Point& f : faces)
        for (int c : g.ball_cells(f, eps * (1.0 - 1e-9))) mark[c] = 1;
    const double count = static_cast<double>(std::count(mark.begin(), mark.end(), 1));
    out.push_back({eps, count * g.cell_volume()});
  }
  return out;
}

double h5_intercept(const std::vector<std::pair<double, double>>& decay) {
  const int m = static_cast<int>(decay.size());
  if (m == 0) return 0.0;
  const int cols = std::min(3, m);
  Eigen::MatrixXd A(m, cols);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const double e = decay[i].first;
    for (int j = 0; j < cols; ++j) A(i, j) = std::pow(e, j);
    b(i) = decay[i].second;
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  return x(0);
}

double h_of(const Point& x0, double rho, const WeightField& mu_lambda_abs,
            const WeightField& lambda) {
  const GridDomain& g = lambda.grid();
  if (!g.contains_ball(x0, rho)) throw Error(ErrorKind::BallEscapesDomain, "B_rho(x0) leaves the domain");
  const auto cells = g.ball_cells(x0, rho);
  const double l = lambda.measure(cells);
  if (!(l > 0.0)) throw Error(ErrorKind::InvalidInput, "ball contains no cells");
  return mu_lambda_abs.measure(cells) / l;
}

double f_of(const Point& x0, double rho, const WeightField& mu_lambda_abs,
            const WeightField& lambda) {
  return h_of(x0, rho, mu_lambda_abs, lambda) * rho * rho;
}

KappaTau kappa_tau(const WeightField& mu_lambda_abs, const WeightField& lambda,
                   const BallFamily& family, int subset_samples, std::uint64_t seed,
                   double kappa_cap) {
  if (subset_samples < 1) throw Error(ErrorKind::InvalidInput, "subset_samples must be >= 1");
  const auto balls = family.balls();
  if (balls.empty()) throw Error(ErrorKind::EmptyFamily, "no balls to sample");
  require_positive(mu_lambda_abs, balls);
  require_positive(lambda, balls);
  const GridDomain& g = lambda.grid();
  std::vector<Pairs> per_ball(balls.size());
  const long nb = static_cast<long>(balls.size());
#pragma omp parallel for schedule(dynamic, 2) if (nb > 4)
  for (long b = 0; b < nb; ++b) {
    const auto cells = g.ball_cells(balls[b].center, balls[b].radius);
    if (cells.empty()) continue;
    double tl = 0.0, tm = 0.0;
    for (int c : cells) {
      tl += lambda[c];
      tm += mu_lambda_abs[c];
    }
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(b + 1));
    auto add = [&](const std::vector<int>& s) {
      double sl = 0.0, sm = 0.0;
      for (int c : s) {
        sl += lambda[c];
        sm += mu_lambda_abs[c];
      }
      per_ball[b].push_back({sl / tl, sm / tm});
      per_ball[b].push_back({sm / tm, sl / tl});
    };
    for (int dir : {1, -1}) {
      std::vector<int> order = cells;
      std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return dir * lambda[x] / mu_lambda_abs[x] > dir * lambda[y] / mu_lambda_abs[y];
      });
      sample_subsets(g, balls[b], cells, order, subset_samples, rng, add);
    }
  }
  const ExponentFit fit = fit_exponent(per_ball, kappa_cap);
  if (!fit.within_cap) throw Error(ErrorKind::NoFeasibleTau, "no tau keeps kappa within the cap");
  KappaTau out;
  out.kappa = fit.K;
  out.tau = fit.exponent;
  out.witness = balls[fit.witness];
  out.family_size = balls.size();
  return out;
}

HP2Prime hp2_prime(double K2, double q, double c_rh, double varsigma, double delta, int n) {
  if (!(q > 2.0)) throw Error(ErrorKind::InfeasibleChain, "(H.2)' needs q > 2");
  if (!(varsigma > 0.0)) throw Error(ErrorKind::InfeasibleChain, "varsigma must be positive");
  const double bound = std::min(0.5 - 1.0 / q, 1.0 / (n * varsigma));
  if (delta <= 0.0) delta = 0.5 * bound;
  if (delta >= bound) throw Error(ErrorKind::InfeasibleChain, "delta too large for the chain");
  HP2Prime out;
  out.delta = delta;
  out.q_tilde = 1.0 / (1.0 / q + delta);
  out.alpha = 1.0 - n * varsigma * delta;
  out.K2_tilde = std::pow(c_rh, delta) * K2;
  return out;
}

WeightAudit run_weight_audit(const WeightField& mu, const WeightField& lambda,
                             const BallFamily& family, const AuditSettings& s) {
  WeightAudit a;
  const GridDomain& g = mu.grid();
  const SignPartition part = partition_and_interface(mu, s.zero_tol);
  const WeightField mla = build_mu_lambda_abs(mu, lambda, s.zero_tol);
  a.cell_area = g.cell_volume();

  BallFamily inner = family;
  inner.centers.clear();
  for (const Point& p : family.usable_centers())
    if (g.contains_ball(p, 2.0 * family.radii.back())) inner.centers.push_back(p);
  inner.restriction.reset();

  a.K1 = ap_constant(lambda, 2.0, family);
  if (g.dim() >= 2) {
    a.K2 = pair_condition_constant(mla, lambda, 2.0, s.q, 1.0, family);
  } else {
    a.K2.value = std::numeric_limits<double>::quiet_NaN();
    a.failures.push_back("(H.2) the exponent 1 needs dimension at least 2");
  }
  a.K3 = a_infty_params(mla, family, s.subset_samples, s.seed, s.a_infty_cap);
  if (!inner.centers.empty()) {
    a.doubling_lambda = doubling_constant(lambda, inner);
    a.doubling_mu_lambda_abs = doubling_constant(mla, inner);
    a.h4 = h4_constant(mu, lambda, part, inner);
  } else {
    a.failures.push_back("no ball of the family fits twice inside the domain");
  }
  try {
    a.rh = reverse_holder_fit(mla, family, s.delta_grid, 2.0, s.rh_cap);
  } catch (const Error& e) {
    a.failures.push_back(e.what());
  }
  std::vector<double> eps = s.eps_list;
  if (eps.empty()) {
    const double h = g.cell_size(0);
    for (int k = 8; k >= 1; --k) eps.push_back(k * h);
  }
  a.h5 = h5_decay(part, eps);
  a.h5_intercept = h5_intercept(a.h5);
  try {
    a.kt = kappa_tau(mla, lambda, family, s.subset_samples, s.seed, s.kappa_cap);
  } catch (const Error& e) {
    a.failures.push_back(e.what());
  }
  try {
    a.hp2 = hp2_prime(a.K2.value, s.q, a.rh.c_rh, a.K3.varsigma, 0.0, g.dim());
  } catch (const Error& e) {
    a.hp2_feasible = false;
    a.failures.push_back(e.what());
  }
  if (!(a.h4.q <= s.h4_cap)) a.failures.push_back("(H.4) doubling constant exceeds the cap");
  if (a.h5_intercept > a.cell_area) a.failures.push_back("(H.5) decay does not extrapolate to zero");
  return a;
}

}  // namespace mixlab
