#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mixlab/degiorgi.hpp"
#include "mixlab/error.hpp"
#include "mixlab/harnack_lab.hpp"
#include "mixlab/report.hpp"
#include "mixlab/scenario.hpp"
#include "mixlab/solver.hpp"
#include "mixlab/weight_lab.hpp"

using namespace mixlab;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kInput = 1, kHypothesis = 2, kNumerical = 3;

struct Options {
  std::string out_dir = "mixlab-out";
  int jobs = 1;
  int levels = 0;
  bool binary = false;
  std::vector<double> thetas;
  std::vector<double> at;
  double time = 0.0;
  double rho = 0.0;
  std::string which_case;
};

struct Outcome {
  int code = kOk;
  std::string text;
};

struct Level {
  int index = 0;
  Scenario scenario;
  Solution solution;
};

int code_of(const Error& e) {
  if (e.kind() == ErrorKind::ScenarioError || e.kind() == ErrorKind::InvalidInput) return kInput;
  return is_hypothesis_failure(e.kind()) ? kHypothesis : kNumerical;
}

std::string scenario_dir(const Options& o, const ScenarioFile& f) {
  return (fs::path(o.out_dir) / (f.scenario.name.empty() ? "scenario" : f.scenario.name)).string();
}

int level_count(const Options& o, const ScenarioFile& f) { return o.levels > 0 ? o.levels : f.queries.levels; }

std::vector<Level> solve_levels(const ScenarioFile& f, int levels) {
  std::vector<Level> out;
  Scenario s = f.scenario;
  for (int l = 0; l < levels; ++l) {
    out.push_back({l, s, solve(s)});
    s = s.refined(f.queries.refinement == "diffusive");
  }
  return out;
}

Json level_header(const Level& l) {
  const GridDomain& g = l.scenario.grid;
  return {{"level", l.index}, {"nx", g.nx()}, {"ny", g.ny()}, {"steps", g.time_steps()}};
}

Json record(const std::string& command, const ScenarioFile& f, int levels) {
  return {{"command", command}, {"provenance", provenance(f, levels)}, {"levels", Json::array()}};
}

void merge(Json& into, const Json& from) {
  for (auto it = from.begin(); it != from.end(); ++it) into[it.key()] = it.value();
}

Outcome audit(const ScenarioFile& f, const Options& o) {
  char buf[512];
  const WeightAudit a = run_weight_audit(f.scenario.mu_field(), f.scenario.lambda_field(), audit_family(f),
                                         f.audit.settings);
  Json rec = record("weights audit", f, 1);
  Json lv = {{"level", 0}};
  merge(lv, to_json(a));
  rec["levels"].push_back(lv);
  write_text(scenario_dir(o, f) + "/audit.json", dump(rec));
  Outcome out;
  std::snprintf(buf, sizeof buf, "%s: K1=%.6g K2=%.6g K3=%.6g varsigma=%.3g q=%.6g h5_intercept=%.3g",
                f.scenario.name.c_str(), a.K1.value, a.K2.value, a.K3.K, a.K3.varsigma, a.h4.q, a.h5_intercept);
  out.text = buf;
  for (const auto& msg : a.failures) out.text += "\n  hypothesis failure: " + msg;
  if (!a.failures.empty()) out.code = kHypothesis;
  return out;
}

Outcome solve_cmd(const ScenarioFile& f, const Options& o) {
  char buf[512];
  const int L = level_count(o, f);
  const auto levels = solve_levels(f, L);
  Json rec = record("solve", f, L);
  Outcome out;
  out.text = f.scenario.name + ":";
  const std::string dir = scenario_dir(o, f);
  for (const auto& l : levels) {
    Json lv = level_header(l);
    merge(lv, to_json(l.solution.report));
    if (l.scenario.exact) {
      double err = 0.0;
      const GridDomain& g = l.scenario.grid;
      for (int n = 0; n < g.num_levels(); ++n)
        for (int c = 0; c < g.num_cells(); ++c)
          err = std::max(err, std::abs(l.solution.u(c, n) - l.scenario.exact->eval(g.center(c), g.time(n))));
      lv["max_error"] = number(err);
    }
    rec["levels"].push_back(lv);
    const std::string stem = dir + "/solution_l" + std::to_string(l.index);
    std::ostringstream csv;
    write_solution_csv(csv, l.solution.u, l.scenario.exact);
    write_text(stem + ".csv", csv.str());
    if (o.binary) {
      std::ostringstream bin(std::ios::binary);
      write_solution_binary(bin, l.solution.u);
      write_text(stem + ".bin", bin.str());
    }
    std::snprintf(buf, sizeof buf, " [l%d residual=%.3g unknowns=%d]", l.index, l.solution.report.residual,
                  l.solution.report.system_size);
    out.text += buf;
  }
  write_text(dir + "/solve.json", dump(rec));
  return out;
}

Point point_of(const ScenarioFile& f, const Options& o) {
  if (o.at.empty()) return query_point(f);
  if (static_cast<int>(o.at.size()) != f.scenario.grid.dim())
    throw Error(ErrorKind::InvalidInput, "--at needs one coordinate per dimension");
  return {o.at[0], o.at.size() > 1 ? o.at[1] : 0.0};
}

double time_of(const ScenarioFile& f, const Options& o) { return o.time > 0.0 ? o.time : query_time(f); }
double rho_of(const ScenarioFile& f, const Options& o) { return o.rho > 0.0 ? o.rho : query_rho(f); }

HarnackCase harnack_case(const std::string& s) {
  if (s == "i") return HarnackCase::i;
  if (s == "ii") return HarnackCase::ii;
  if (s == "iii") return HarnackCase::iii;
  if (s == "iv") return HarnackCase::iv;
  if (s == "mixed") return HarnackCase::mixed;
  throw Error(ErrorKind::InvalidInput, "unknown Harnack case " + s);
}

PositivityCase positivity_case(const std::string& s) {
  if (s == "plus") return PositivityCase::plus;
  if (s == "minus") return PositivityCase::minus;
  if (s == "zero") return PositivityCase::zero;
  if (s == "omega0") return PositivityCase::omega0;
  throw Error(ErrorKind::InvalidInput, "unknown positivity case " + s);
}

LinftyCase linfty_case(const std::string& s) {
  if (s == "i") return LinftyCase::i;
  if (s == "ii") return LinftyCase::ii;
  if (s == "iii") return LinftyCase::iii;
  throw Error(ErrorKind::InvalidInput, "unknown L-infinity case " + s);
}

Outcome verify(const std::string& which, const ScenarioFile& f, const Options& o) {
  char buf[512];
  const int L = level_count(o, f);
  const auto levels = solve_levels(f, L);
  Json rec = record("verify " + which, f, L);
  Outcome out;
  out.text = f.scenario.name + " " + which + ":";
  const std::string dir = scenario_dir(o, f);
  const Point x = point_of(f, o);
  const double t = time_of(f, o);
  const double rho = rho_of(f, o);

  for (const auto& l : levels) {
    const DgContext ctx(l.scenario.mu_field(), l.scenario.lambda_field(), l.scenario.zero_tol);
    const SpaceTimeField& u = l.solution.u;
    Json lv = level_header(l);
    if (which == "degiorgi") {
      const auto rep = gamma_fit(u, ctx, default_sweep(l.scenario.grid));
      merge(lv, to_json(rep));
      std::snprintf(buf, sizeof buf, " [l%d gamma=%.4g]", l.index, rep.gamma);
    } else if (which == "linfty") {
      const double R = f.queries.linfty_radius > 0.0 ? f.queries.linfty_radius : 4.0 * rho;
      const auto r = linfty_check(u, ctx, x, t, R, f.queries.linfty_beta,
                                  linfty_case(o.which_case.empty() ? f.queries.linfty_case : o.which_case));
      merge(lv, to_json(r));
      std::snprintf(buf, sizeof buf, " [l%d c_inf=%.4g]", l.index, r.c_inf);
    } else if (which == "harnack") {
      HarnackQuery q;
      q.x = x;
      q.t = t;
      q.rho = rho;
      q.omega = f.queries.omega;
      q.kind = harnack_case(o.which_case.empty() ? f.queries.harnack_case : o.which_case);
      const std::vector<double> thetas = o.thetas.empty() ? std::vector<double>{f.queries.theta} : o.thetas;
      Json table = Json::array();
      std::string line = " [l" + std::to_string(l.index);
      for (double th : thetas) {
        q.theta = th;
        Json row = {{"theta", th}};
        merge(row, to_json(harnack_constant(u, ctx, q)));
        std::snprintf(buf, sizeof buf, " theta=%g ratio=%.5g", th, row["ratio"].is_number() ? row["ratio"].get<double>() : INFINITY);
        line += buf;
        table.push_back(row);
      }
      lv["case"] = to_string(q.kind);
      lv["table"] = table;
      std::snprintf(buf, sizeof buf, "%s]", line.c_str());
    } else if (which == "positivity") {
      PositivityQuery q;
      q.x = x;
      q.t = t;
      q.rho = rho;
      q.beta = f.queries.beta;
      q.beta_tilde = f.queries.beta_tilde;
      q.theta_hat = f.queries.theta_hat;
      q.kind = positivity_case(o.which_case.empty() ? f.queries.positivity_case : o.which_case);
      q.h_level = f.queries.h_level;
      if (q.h_level <= 0.0) {
        const Label s = q.kind == PositivityCase::plus ? Label::plus
                        : q.kind == PositivityCase::minus ? Label::minus
                                                           : Label::zero;
        auto seed = q.kind == PositivityCase::omega0 ? l.scenario.grid.ball_cells(x, rho) : ctx.ball(x, rho, s);
        const int n = l.scenario.grid.nearest_level(t);
        q.h_level = INFINITY;
        for (int c : seed) q.h_level = std::min(q.h_level, u(c, n));
        if (!(q.h_level > 0.0)) throw Error(ErrorKind::SeedConditionFailed, "u is not positive on the seed set");
      }
      const auto e = expansion_of_positivity_check(u, ctx, q);
      lv["h_level"] = number(q.h_level);
      merge(lv, to_json(e));
      std::snprintf(buf, sizeof buf, " [l%d lambda_hat=2^-%d]", l.index, e.rung);
    } else if (which == "holder") {
      std::vector<double> radii = f.queries.holder_radii;
      if (radii.empty())
        for (double m : {1.0, 2.0, 4.0, 8.0}) radii.push_back(m * rho);
      const auto rep = gamma_fit(u, ctx, default_sweep(l.scenario.grid));
      const auto fit = holder_exponent(u, ctx, x, t, radii, rep.gamma);
      merge(lv, to_json(fit));
      lv["gamma"] = number(rep.gamma);
      write_text(dir + "/holder_l" + std::to_string(l.index) + ".csv", holder_csv(fit));
      std::snprintf(buf, sizeof buf, " [l%d alpha=%.4g R2=%.4g]", l.index, fit.alpha, fit.r_squared);
    } else if (which == "maxprin") {
      const auto m = max_principle_check(u, ctx, x, t, o.thetas.empty() ? f.queries.theta : o.thetas[0], rho);
      merge(lv, to_json(m));
      std::snprintf(buf, sizeof buf, " [l%d %s]", l.index, to_string(m.verdict).c_str());
      if (m.verdict == MaxVerdict::violation) out.code = kHypothesis;
    }
    out.text += buf;
    rec["levels"].push_back(lv);
  }
  write_text(dir + "/verify_" + which + ".json", dump(rec));
  return out;
}

int run_all(const std::vector<std::string>& paths, const Options& o,
            const std::function<Outcome(const ScenarioFile&, const Options&)>& task) {
  std::vector<Outcome> results(paths.size());
  const int n = static_cast<int>(paths.size());
#pragma omp parallel for num_threads(std::max(1, o.jobs)) schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      results[i] = task(load_scenario(paths[i]), o);
    } catch (const Error& e) {
      results[i] = {code_of(e), paths[i] + ": " + e.what()};
    } catch (const std::exception& e) {
      results[i] = {kNumerical, paths[i] + ": " + e.what()};
    }
  }
  int code = kOk;
  for (const auto& r : results) {
    (r.code == kOk ? std::cout : std::cerr) << r.text << "\n";
    code = std::max(code, r.code);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for mixed forward-backward degenerate parabolic equations"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--out", o.out_dir, "Output directory")->envname("MIXLAB_OUT")->capture_default_str();
  app.add_option("--jobs,-j", o.jobs, "Scenarios processed in parallel")->check(CLI::PositiveNumber);

  std::vector<std::string> paths;
  auto* weights = app.add_subcommand("weights", "Weight hypotheses");
  weights->require_subcommand(1);
  auto* audit_cmd = weights->add_subcommand("audit", "Audit the weight hypotheses of scenarios");
  audit_cmd->add_option("scenarios", paths, "Scenario files")->required()->check(CLI::ExistingFile);

  auto* solve_sub = app.add_subcommand("solve", "Solve scenarios and dump the fields");
  solve_sub->add_option("scenarios", paths, "Scenario files")->required()->check(CLI::ExistingFile);
  solve_sub->add_option("--levels", o.levels, "Grid levels (refinements + 1)")->check(CLI::PositiveNumber);
  solve_sub->add_flag("--binary", o.binary, "Also write the raw binary field");

  std::string which;
  auto* verify_sub = app.add_subcommand("verify", "Check De Giorgi, Harnack, Hoelder or maximum principle");
  verify_sub->add_option("which", which, "What to verify")
      ->required()
      ->check(CLI::IsMember({"degiorgi", "harnack", "holder", "maxprin", "linfty", "positivity"}));
  verify_sub->add_option("scenarios", paths, "Scenario files")->required()->check(CLI::ExistingFile);
  verify_sub->add_option("--levels", o.levels, "Grid levels (refinements + 1)")->check(CLI::PositiveNumber);
  verify_sub->add_option("--case", o.which_case, "Case of the Harnack, L-infinity or positivity check");
  verify_sub->add_option("--theta", o.thetas, "Waiting time parameter(s)")->delimiter(',');
  verify_sub->add_option("--at", o.at, "Query point x[,y]")->delimiter(',');
  verify_sub->add_option("--time", o.time, "Query time");
  verify_sub->add_option("--rho", o.rho, "Query radius");

  std::string run_dir;
  auto* report_sub = app.add_subcommand("report", "Consolidate a run directory");
  report_sub->add_option("run_dir", run_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (audit_cmd->parsed()) return run_all(paths, o, audit);
    if (solve_sub->parsed()) return run_all(paths, o, solve_cmd);
    if (verify_sub->parsed())
      return run_all(paths, o, [&](const ScenarioFile& f, const Options& opt) { return verify(which, f, opt); });
    if (report_sub->parsed()) {
      const Json c = consolidate(run_dir);
      write_text((fs::path(run_dir) / "report.json").string(), dump(c));
      write_text((fs::path(run_dir) / "summary.csv").string(), summary_csv(c));
      std::cout << c["records"].size() << " records\n";
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return code_of(e);
  }
  return kOk;
}
