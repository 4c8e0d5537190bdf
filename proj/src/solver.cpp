#include "mixlab/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>

#include "mixlab/error.hpp"

namespace mixlab {

namespace {

enum class Regime { forward, backward, elliptic };

Regime regime_of(double mu, double zero_tol) {
  if (std::abs(mu) <= zero_tol) return Regime::elliptic;
  return mu > 0.0 ? Regime::forward : Regime::backward;
}

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

}  // namespace

WeightField Scenario::mu_field() const {
  return WeightField::from_expression(grid, mu, WeightKind::mu, zero_tol);
}

WeightField Scenario::lambda_field() const {
  return WeightField::from_expression(grid, lambda, WeightKind::lambda);
}

Scenario Scenario::refined(bool diffusive_time) const {
  Scenario s = *this;
  s.grid = grid.refined(diffusive_time);
  return s;
}

SparseSystem assemble(const Scenario& s) {
  const GridDomain& g = s.grid;
  const int nc = g.num_cells();
  const int N = g.time_steps();
  const double dt = g.dt();
  const double T = g.final_time();
  const WeightField mu = s.mu_field();
  const WeightField lambda = s.lambda_field();
  const bool both_initial = s.placement == DataPlacement::both_initial;

  SparseSystem sys;
  sys.known = SpaceTimeField(g, 0.0);
  sys.unknown.assign(static_cast<std::size_t>(nc) * g.num_levels(), -1);
  std::vector<Regime> regime(nc);
  for (int c = 0; c < nc; ++c) {
    regime[c] = regime_of(mu[c], s.zero_tol);
    const Point x = g.center(c);
    if (regime[c] == Regime::forward) sys.known(c, 0) = s.data_plus.eval(x, 0.0);
    if (regime[c] == Regime::backward) {
      if (both_initial)
        sys.known(c, 0) = s.data_minus.eval(x, 0.0);
      else
        sys.known(c, N) = s.data_minus.eval(x, T);
    }
  }
  auto is_known = [&](int c, int n) {
    if (regime[c] == Regime::forward) return n == 0;
    if (regime[c] == Regime::backward) return both_initial ? n == 0 : n == N;
    return false;
  };
  for (int n = 0; n <= N; ++n)
    for (int c = 0; c < nc; ++c)
      if (!is_known(c, n)) sys.unknown[static_cast<std::size_t>(n) * nc + c] = sys.size++;
  sys.rhs.assign(sys.size, 0.0);

  std::array<double, 2> inv_h2{1.0 / (g.cell_size(0) * g.cell_size(0)),
                               1.0 / (g.cell_size(1) * g.cell_size(1))};
  for (int n = 0; n <= N; ++n) {
    for (int c = 0; c < nc; ++c) {
      const int row = sys.unknown[static_cast<std::size_t>(n) * nc + c];
      if (row < 0) continue;
      // Equation level: the unknown's level, or one below it for backward cells with initial data.
      const int m = (regime[c] == Regime::backward && both_initial) ? n - 1 : n;
      auto add = [&](int cell, int level, double coef) {
        const int col = sys.unknown[static_cast<std::size_t>(level) * nc + cell];
        if (col >= 0) {
          sys.rows.push_back(row);
          sys.cols.push_back(col);
          sys.vals.push_back(coef);
        } else {
          sys.rhs[row] -= coef * sys.known(cell, level);
        }
      };
      const Point x = g.center(c);
      double diag = 0.0;
      if (regime[c] == Regime::forward) {
        diag += mu[c] / dt;
        add(c, m - 1, -mu[c] / dt);
      } else if (regime[c] == Regime::backward) {
        diag -= mu[c] / dt;
        add(c, m + 1, mu[c] / dt);
      }
      const auto nb = g.neighbors(c);
      for (int f = 0; f < 2 * g.dim(); ++f) {
        const int axis = f / 2;
        if (nb[f] >= 0) {
          const double t = harmonic(lambda[c], lambda[nb[f]]) * inv_h2[axis];
          diag += t;
          add(nb[f], m, -t);
        } else {
          const double t = 2.0 * lambda[c] * inv_h2[axis];
          const double off = (f % 2 == 0 ? -0.5 : 0.5) * g.cell_size(axis);
          const Point face{axis == 0 ? x.x + off : x.x, axis == 1 ? x.y + off : x.y};
          diag += t;
          sys.rhs[row] += t * s.dirichlet.eval(face, g.time(m));
        }
      }
      add(c, m, diag);
      sys.rhs[row] += s.source.eval(x, g.time(m));
    }
  }
  return sys;
}

double slice_energy(const SpaceTimeField& u, const WeightField& lambda, int level) {
  const GridDomain& g = u.grid();
  const GradientField du = gradient(g, u.slice(level));
  double e = 0.0;
  for (int c = 0; c < g.num_cells(); ++c) e += lambda[c] * (du.gx[c] * du.gx[c] + du.gy[c] * du.gy[c]);
  return 0.5 * e * g.cell_volume();
}

Solution solve(const Scenario& s) {
  SparseSystem sys = assemble(s);
  using SpMat = Eigen::SparseMatrix<double>;
  SpMat A(sys.size, sys.size);
  {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(sys.vals.size());
    for (std::size_t k = 0; k < sys.vals.size(); ++k) trip.emplace_back(sys.rows[k], sys.cols[k], sys.vals[k]);
    A.setFromTriplets(trip.begin(), trip.end());
  }
  A.makeCompressed();
  Eigen::Map<const Eigen::VectorXd> b(sys.rhs.data(), sys.size);
  Eigen::VectorXd diag = A.diagonal().cwiseAbs();

  Eigen::UmfPackLU<SpMat> lu;
  lu.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_BEST;
  lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
  {
    // The METIS ordering keeps global state.
    static std::mutex ordering;
    std::lock_guard<std::mutex> lock(ordering);
    lu.analyzePattern(A);
  }
  lu.factorize(A);
  if (lu.info() != Eigen::Success) {
    // Rows without a diagonal entry hint at the null space.
    int zero_diag = 0;
    for (int i = 0; i < sys.size; ++i) zero_diag += diag[i] == 0.0;
    throw Error(ErrorKind::SingularSystem,
                "factorization failed; " + std::to_string(zero_diag) + " rows with zero diagonal");
  }
  Eigen::VectorXd x = lu.solve(b);
  auto scaled_residual = [&](const Eigen::VectorXd& r) {
    double m = 0.0;
    for (int i = 0; i < sys.size; ++i) m = std::max(m, std::abs(r[i]) / diag[i]);
    return m;
  };
  Eigen::VectorXd r = b - A * x;
  double res = scaled_residual(r);
  std::string trace = std::to_string(res);
  int it = 0;
  while (!(res <= s.tolerance * 1e-2) && it < s.max_refinements) {
    x += lu.solve(r);
    r = b - A * x;
    res = scaled_residual(r);
    trace += " " + std::to_string(res);
    ++it;
  }
  if (!(res <= s.tolerance))
    throw Error(ErrorKind::NonConvergence, "residual trace: " + trace);

  Solution out;
  out.u = sys.known;
  for (std::size_t k = 0; k < sys.unknown.size(); ++k)
    if (sys.unknown[k] >= 0) out.u.values()[k] = x[sys.unknown[k]];
  out.report.residual = res;
  out.report.system_size = sys.size;
  out.report.nonzeros = A.nonZeros();
  out.report.iterations = it;
  const WeightField lambda = s.lambda_field();
  for (int n = 0; n < s.grid.num_levels(); ++n) out.report.slice_energy.push_back(slice_energy(out.u, lambda, n));
  return out;
}

std::vector<SpaceTimeField> bump_bank(const GridDomain& g, int count, double amplitude, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto o = g.origin();
  const auto e = g.extent();
  double span = e[0];
  if (g.dim() == 2) span = std::min(span, e[1]);
  const double T = g.final_time();
  std::vector<SpaceTimeField> bank;
  for (int k = 0; k < count; ++k) {
    const double R = span * (0.1 + 0.15 * U(rng));
    const double S = T * (0.1 + 0.15 * U(rng));
    const double margin = 2.0 * std::max(g.cell_size(0), g.dim() == 2 ? g.cell_size(1) : 0.0);
    auto place = [&](double lo, double len, double rad) {
      return lo + rad + margin + U(rng) * (len - 2.0 * (rad + margin));
    };
    const Point c{place(o[0], e[0], R), g.dim() == 2 ? place(o[1], e[1], R) : 0.0};
    const double tc = 2.0 * g.dt() + S + U(rng) * (T - 2.0 * S - 4.0 * g.dt());
    SpaceTimeField phi(g, 0.0);
    for (int n = 0; n < g.num_levels(); ++n) {
      const double s = (g.time(n) - tc) / S;
      if (std::abs(s) >= 1.0) continue;
      const double ft = (1 - s * s) * (1 - s * s);
      for (int cell = 0; cell < g.num_cells(); ++cell) {
        const double r = distance(g.center(cell), c) / R;
        if (r >= 1.0) continue;
        phi(cell, n) = amplitude * ft * (1 - r * r) * (1 - r * r);
      }
    }
    bank.push_back(std::move(phi));
  }
  return bank;
}

QminResult qmin_ratio(const SpaceTimeField& u, const Scenario& s, const std::vector<SpaceTimeField>& bank) {
  const GridDomain& g = u.grid();
  const WeightField mu = s.mu_field();
  const WeightField lambda = s.lambda_field();
  const int nc = g.num_cells();
  const double w = g.cell_volume() * g.dt();
  std::vector<GradientField> du;
  for (int n = 0; n < g.num_levels(); ++n) du.push_back(gradient(g, u.slice(n)));

  QminResult res;
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const SpaceTimeField& phi = bank[k];
    double lhs_e = 0.0, rhs_e = 0.0, transport = 0.0;
    bool any = false;
    std::vector<double> diff(nc);
    for (int n = 0; n < g.num_levels(); ++n) {
      const double* p = phi.slice(n);
      std::vector<char> in(nc, 0);
      bool level_any = false;
      for (int c = 0; c < nc; ++c) {
        if (p[c] == 0.0) continue;
        level_any = true;
        in[c] = 1;
        for (int d : g.neighbors(c))
          if (d >= 0) in[d] = 1;
      }
      if (!level_any) continue;
      any = true;
      const double* un = u.slice(n);
      for (int c = 0; c < nc; ++c) diff[c] = un[c] - p[c];
      const GradientField dd = gradient(g, diff);
      const int lo = std::max(n - 1, 0), hi = std::min(n + 1, g.time_steps());
      for (int c = 0; c < nc; ++c) {
        if (!in[c]) continue;
        lhs_e += lambda[c] * (du[n].gx[c] * du[n].gx[c] + du[n].gy[c] * du[n].gy[c]);
        rhs_e += lambda[c] * (dd.gx[c] * dd.gx[c] + dd.gy[c] * dd.gy[c]);
        const double phit = (phi(c, hi) - phi(c, lo)) / ((hi - lo) * g.dt());
        transport += mu[c] * un[c] * phit;
      }
    }
    if (!any) {
      ++res.skipped;
      continue;
    }
    const double lhs = (-transport + 0.5 * lhs_e) * w;
    const double rhs = 0.5 * rhs_e * w;
    if (!(rhs > 0.0)) {
      if (lhs > 1e-14) throw Error(ErrorKind::DegenerateTest, "test " + std::to_string(k) + " has zero energy");
      ++res.skipped;
      continue;
    }
    ++res.used;
    const double q = lhs / rhs;
    if (res.witness < 0 || q > res.q) {
      res.q = q;
      res.witness = static_cast<int>(k);
    }
  }
  return res;
}

bool structure_condition_check(const GradientField& a, const std::vector<double>& b,
                               const GradientField& du, const WeightField& lambda, double L,
                               double M, double tol) {
  for (std::size_t c = 0; c < du.gx.size(); ++c) {
    const double g = du.norm(static_cast<int>(c));
    const double lam = lambda[static_cast<int>(c)];
    const double slack = tol * (1.0 + lam * g * g);
    const double dot = a.gx[c] * du.gx[c] + a.gy[c] * du.gy[c];
    if (dot < lam * g * g - slack) return false;
    if (a.norm(static_cast<int>(c)) > L * lam * g + slack) return false;
    if (std::abs(b[c]) > M * lam * g + slack) return false;
  }
  return true;
}

void write_solution_csv(std::ostream& out, const SpaceTimeField& u, const std::optional<Expression>& exact) {
  const GridDomain& g = u.grid();
  out << (g.dim() == 2 ? "t,x,y,u" : "t,x,u") << (exact ? ",exact,error" : "") << '\n';
  char buf[160];
  for (int n = 0; n < g.num_levels(); ++n) {
    const double t = g.time(n);
    for (int c = 0; c < g.num_cells(); ++c) {
      const Point x = g.center(c);
      if (g.dim() == 2)
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g", t, x.x, x.y, u(c, n));
      else
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", t, x.x, u(c, n));
      out << buf;
      if (exact) {
        const double e = exact->eval(x, t);
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", e, u(c, n) - e);
        out << buf;
      }
      out << '\n';
    }
  }
}

void write_solution_binary(std::ostream& out, const SpaceTimeField& u) {
  const GridDomain& g = u.grid();
  const auto o = g.origin();
  const auto e = g.extent();
  char buf[400];
  std::snprintf(buf, sizeof buf,
                "mixlab-field 1 dim=%d nx=%d ny=%d levels=%d x0=%.17g lx=%.17g y0=%.17g ly=%.17g "
                "dt=%.17g dtype=f64le order=level,row,col\n",
                g.dim(), g.nx(), g.ny(), g.num_levels(), o[0], e[0], o[1], e[1], g.dt());
  out << buf;
  for (double v : u.values()) {
    unsigned char bytes[8];
    std::memcpy(bytes, &v, 8);
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

SpaceTimeField read_solution_binary(std::istream& in) {
  std::string header;
  std::getline(in, header);
  int dim = 0, nx = 0, ny = 0, levels = 0;
  double x0 = 0, lx = 0, y0 = 0, ly = 0, dt = 0;
  if (std::sscanf(header.c_str(),
                  "mixlab-field 1 dim=%d nx=%d ny=%d levels=%d x0=%lf lx=%lf y0=%lf ly=%lf dt=%lf",
                  &dim, &nx, &ny, &levels, &x0, &lx, &y0, &ly, &dt) != 9)
    throw Error(ErrorKind::InvalidInput, "bad field header");
  GridDomain g(dim, {nx, ny}, {x0, y0}, {lx, ly}, levels - 1, dt);
  SpaceTimeField u(g);
  for (double& v : u.values()) {
    char bytes[8];
    if (!in.read(bytes, 8)) throw Error(ErrorKind::InvalidInput, "truncated field data");
    std::memcpy(&v, bytes, 8);
  }
  return u;
}

}  // namespace mixlab
