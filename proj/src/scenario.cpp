#include "mixlab/scenario.hpp"

#include <algorithm>
#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mixlab/error.hpp"

namespace mixlab {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::ScenarioError, what); }

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
  return s;
}

double number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) fail("'" + key + "' expects a number, got '" + text + "'");
  return v;
}

int integer(const std::string& key, const std::string& text) {
  const double v = number(key, text);
  if (v != static_cast<int>(v)) fail("'" + key + "' expects an integer");
  return static_cast<int>(v);
}

std::string string_value(const std::string& key, const std::string& text) {
  if (text.size() < 2 || text.front() != '"' || text.back() != '"')
    fail("'" + key + "' expects a quoted string");
  const std::string s = text.substr(1, text.size() - 2);
  if (s.find_first_of("\"\\") != std::string::npos) fail("'" + key + "' may not contain quotes or escapes");
  return s;
}

std::vector<double> array(const std::string& key, const std::string& text) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    fail("'" + key + "' expects an array [a, b, ...]");
  std::vector<std::string> items;
  boost::split(items, text.substr(1, text.size() - 2), boost::is_any_of(","));
  for (auto& item : items) boost::trim(item);
  if (items.size() > 1 && items.back().empty()) items.pop_back();  // trailing comma
  if (items.size() == 1 && items[0].empty()) return {};
  std::vector<double> out;
  for (const auto& item : items) {
    if (item.empty()) fail("empty entry in '" + key + "'");
    out.push_back(number(key, item));
  }
  return out;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

using Section = std::vector<std::pair<std::string, std::string>>;

// Collects one section and checks each key against the allowed set.
Section section(const pt::ptree& tree, const std::string& name, const std::set<std::string>& allowed) {
  Section out;
  for (const auto& [k, v] : tree) {
    if (!v.empty()) fail("nested value under [" + name + "]");
    if (!allowed.count(k)) fail("unknown key '" + k + "' in [" + name + "]");
    out.emplace_back(k, v.data());
  }
  return out;
}

Expression expression(const Section& keys, const std::string& where) {
  Expression e;
  bool have_kind = false;
  for (const auto& [k, v] : keys)
    if (k == "kind") {
      e.kind = string_value(k, v);
      have_kind = true;
    }
  if (!have_kind) fail("missing 'kind' in " + where);
  if (!Expression::known_kind(e.kind)) fail("unknown expression kind '" + e.kind + "' in " + where);
  e.params.clear();
  const auto params = Expression::known_params(e.kind);
  for (const auto& [k, v] : keys) {
    if (k == "kind") continue;
    if (k == "path") {
      if (e.kind != "csv") fail("'path' is only valid for csv expressions in " + where);
      e.path = string_value(k, v);
      continue;
    }
    if (std::find(params.begin(), params.end(), k) == params.end())
      fail("unknown parameter '" + k + "' for kind " + e.kind + " in " + where);
    e.params[k] = number(k, v);
  }
  if (e.kind == "csv" && e.path.empty()) fail("csv expression needs 'path' in " + where);
  return e;
}

void emit_expression(std::string& out, const Expression& e, const std::string& prefix) {
  out += prefix + "kind = " + quote(e.kind) + "\n";
  if (e.kind == "csv") out += prefix + "path = " + quote(e.path) + "\n";
  for (const auto& [k, v] : e.params) out += prefix + k + " = " + fmt(v) + "\n";
}

std::set<std::string> expression_keys() {
  std::set<std::string> keys{"kind", "path"};
  for (const char* kind : {"const", "power", "sgn_x", "sgn_xy", "cusp_n", "cusp_exp", "osc_interface",
                           "piecewise", "sin_pi", "gauss", "linear", "linear_switch", "csv"})
    for (const auto& p : Expression::known_params(kind)) keys.insert(p);
  return keys;
}

const char* kDataParts[] = {"plus", "minus", "dirichlet", "source", "exact"};

void load_csv_expression(Expression& e, const std::string& base_dir, const GridDomain& g) {
  if (e.kind != "csv") return;
  const std::string written = e.path;
  std::filesystem::path p(written);
  if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
  load_csv(e, p.string(), g);
  e.path = written;
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text, const std::string& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(std::string("malformed scenario: ") + e.message() + " at line " + std::to_string(e.line()));
  }

  ScenarioFile f;
  Scenario& s = f.scenario;
  bool have_schema = false;
  std::set<std::string> seen;
  const std::set<std::string> sections{"grid", "mu", "lambda", "data", "solver", "audit", "queries"};

  for (const auto& [name, node] : tree) {
    if (node.empty() && !(sections.count(name) && node.data().empty())) {
      if (name == "schema") {
        f.schema = integer(name, node.data());
        have_schema = true;
      } else if (name == "name") {
        s.name = string_value(name, node.data());
      } else {
        fail("unknown top-level key '" + name + "'");
      }
      continue;
    }
    if (!sections.count(name)) fail("unknown section [" + name + "]");
    seen.insert(name);
  }
  if (!have_schema) fail("missing 'schema' version");
  if (f.schema != kSchemaVersion)
    fail("unsupported schema version " + std::to_string(f.schema) + " (expected " +
         std::to_string(kSchemaVersion) + ")");
  if (!seen.count("grid")) fail("missing [grid] section");

  auto child = [&](const std::string& name) -> const pt::ptree* {
    auto it = tree.find(name);
    return it == tree.not_found() ? nullptr : &it->second;
  };

  {
    int dim = 1, nx = 0, ny = 1, steps = 0;
    std::vector<double> x{0.0, 1.0}, y{0.0, 1.0};
    double T = 0.0;
    for (const auto& [k, v] : section(*child("grid"), "grid", {"dim", "nx", "ny", "x", "y", "steps", "T"})) {
      if (k == "dim") dim = integer(k, v);
      if (k == "nx") nx = integer(k, v);
      if (k == "ny") ny = integer(k, v);
      if (k == "x") x = array(k, v);
      if (k == "y") y = array(k, v);
      if (k == "steps") steps = integer(k, v);
      if (k == "T") T = number(k, v);
    }
    if (dim != 1 && dim != 2) fail("[grid] dim must be 1 or 2");
    if (nx < 1 || ny < 1 || steps < 1) fail("[grid] nx, ny and steps must be positive");
    if (dim == 1 && ny != 1) fail("[grid] ny must be 1 in one dimension");
    if (x.size() != 2 || y.size() != 2 || !(x[1] > x[0]) || !(y[1] > y[0]))
      fail("[grid] x and y must be increasing pairs");
    if (!(T > 0.0)) fail("[grid] T must be positive");
    f.final_time = T;
    s.grid = GridDomain(dim, {nx, ny}, {x[0], dim == 2 ? y[0] : 0.0},
                        {x[1] - x[0], dim == 2 ? y[1] - y[0] : 1.0}, steps, T / steps);
  }

  const auto ekeys = expression_keys();
  if (auto* m = child("mu")) s.mu = expression(section(*m, "mu", ekeys), "[mu]");
  if (auto* l = child("lambda")) s.lambda = expression(section(*l, "lambda", ekeys), "[lambda]");

  if (auto* d = child("data")) {
    std::set<std::string> allowed;
    for (const char* part : kDataParts)
      for (const auto& k : ekeys) allowed.insert(std::string(part) + "." + k);
    std::map<std::string, Section> parts;
    for (const auto& [k, v] : section(*d, "data", allowed)) {
      const auto dot = k.find('.');
      parts[k.substr(0, dot)].emplace_back(k.substr(dot + 1), v);
    }
    for (const auto& [part, keys] : parts) {
      Expression e = expression(keys, "[data] " + part);
      if (part == "plus") s.data_plus = e;
      if (part == "minus") s.data_minus = e;
      if (part == "dirichlet") s.dirichlet = e;
      if (part == "source") s.source = e;
      if (part == "exact") s.exact = e;
    }
  }

  if (auto* sv = child("solver")) {
    for (const auto& [k, v] :
         section(*sv, "solver", {"data_placement", "zero_tol", "tolerance", "max_refinements"})) {
      if (k == "data_placement") {
        const auto p = string_value(k, v);
        if (p == "forward_backward")
          s.placement = DataPlacement::forward_backward;
        else if (p == "both_initial")
          s.placement = DataPlacement::both_initial;
        else
          fail("[solver] data_placement must be forward_backward or both_initial");
      }
      if (k == "zero_tol") s.zero_tol = number(k, v);
      if (k == "tolerance") s.tolerance = number(k, v);
      if (k == "max_refinements") s.max_refinements = integer(k, v);
    }
    if (s.zero_tol < 0.0 || !(s.tolerance > 0.0) || s.max_refinements < 0)
      fail("[solver] values out of range");
  }
  f.audit.settings.zero_tol = s.zero_tol;

  if (auto* a = child("audit")) {
    AuditConfig& c = f.audit;
    for (const auto& [k, v] : section(*a, "audit",
                                       {"q", "subset_samples", "seed", "a_infty_cap", "kappa_cap", "rh_cap",
                                        "h4_cap", "delta_grid", "eps_list", "centers", "r_min", "r_max",
                                        "random_nodes"})) {
      if (k == "q") c.settings.q = number(k, v);
      if (k == "subset_samples") c.settings.subset_samples = integer(k, v);
      if (k == "seed") c.settings.seed = static_cast<std::uint64_t>(integer(k, v));
      if (k == "a_infty_cap") c.settings.a_infty_cap = number(k, v);
      if (k == "kappa_cap") c.settings.kappa_cap = number(k, v);
      if (k == "rh_cap") c.settings.rh_cap = number(k, v);
      if (k == "h4_cap") c.settings.h4_cap = number(k, v);
      if (k == "delta_grid") c.settings.delta_grid = array(k, v);
      if (k == "eps_list") c.settings.eps_list = array(k, v);
      if (k == "centers") {
        const auto flat = array(k, v);
        const int d = s.grid.dim();
        if (flat.size() % d) fail("[audit] centers must list whole points");
        for (std::size_t i = 0; i < flat.size(); i += d) c.centers.push_back({flat[i], d == 2 ? flat[i + 1] : 0.0});
      }
      if (k == "r_min") c.r_min = number(k, v);
      if (k == "r_max") c.r_max = number(k, v);
      if (k == "random_nodes") c.random_nodes = integer(k, v);
    }
  }

  if (auto* qn = child("queries")) {
    QueryConfig& q = f.queries;
    for (const auto& [k, v] :
         section(*qn, "queries",
                 {"point", "time", "rho", "theta", "omega", "harnack_case", "holder_radii", "positivity_case",
                  "h_level", "beta", "beta_tilde", "theta_hat", "linfty_case", "linfty_radius", "linfty_beta",
                  "levels", "refinement"})) {
      if (k == "point") q.point = array(k, v);
      if (k == "time") q.time = number(k, v);
      if (k == "rho") q.rho = number(k, v);
      if (k == "theta") q.theta = number(k, v);
      if (k == "omega") q.omega = number(k, v);
      if (k == "harnack_case") q.harnack_case = string_value(k, v);
      if (k == "holder_radii") q.holder_radii = array(k, v);
      if (k == "positivity_case") q.positivity_case = string_value(k, v);
      if (k == "h_level") q.h_level = number(k, v);
      if (k == "beta") q.beta = number(k, v);
      if (k == "beta_tilde") q.beta_tilde = number(k, v);
      if (k == "theta_hat") q.theta_hat = number(k, v);
      if (k == "linfty_case") q.linfty_case = string_value(k, v);
      if (k == "linfty_radius") q.linfty_radius = number(k, v);
      if (k == "linfty_beta") q.linfty_beta = number(k, v);
      if (k == "levels") q.levels = integer(k, v);
      if (k == "refinement") q.refinement = string_value(k, v);
    }
    if (!q.point.empty() && static_cast<int>(q.point.size()) != s.grid.dim())
      fail("[queries] point must have one coordinate per dimension");
    if (q.levels < 1) fail("[queries] levels must be at least 1");
    if (q.refinement != "diffusive" && q.refinement != "uniform")
      fail("[queries] refinement must be diffusive or uniform");
  }

  for (Expression* e : {&s.mu, &s.lambda, &s.source, &s.dirichlet, &s.data_plus, &s.data_minus})
    load_csv_expression(*e, base_dir, s.grid);
  if (s.exact) load_csv_expression(*s.exact, base_dir, s.grid);
  return f;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_scenario(ss.str(), dir.empty() ? "." : dir.string());
}

std::string serialize_scenario(const ScenarioFile& f) {
  const Scenario& s = f.scenario;
  const GridDomain& g = s.grid;
  std::string out;
  out += "schema = " + std::to_string(f.schema) + "\n";
  out += "name = " + quote(s.name) + "\n\n";

  out += "[grid]\n";
  out += "dim = " + std::to_string(g.dim()) + "\n";
  out += "nx = " + std::to_string(g.nx()) + "\n";
  if (g.dim() == 2) out += "ny = " + std::to_string(g.ny()) + "\n";
  const auto o = g.origin();
  const auto e = g.extent();
  out += "x = " + list({o[0], o[0] + e[0]}) + "\n";
  if (g.dim() == 2) out += "y = " + list({o[1], o[1] + e[1]}) + "\n";
  out += "steps = " + std::to_string(g.time_steps()) + "\n";
  out += "T = " + fmt(f.final_time) + "\n\n";

  out += "[mu]\n";
  emit_expression(out, s.mu, "");
  out += "\n[lambda]\n";
  emit_expression(out, s.lambda, "");

  out += "\n[data]\n";
  emit_expression(out, s.data_plus, "plus.");
  emit_expression(out, s.data_minus, "minus.");
  emit_expression(out, s.dirichlet, "dirichlet.");
  emit_expression(out, s.source, "source.");
  if (s.exact) emit_expression(out, *s.exact, "exact.");

  out += "\n[solver]\n";
  out += std::string("data_placement = ") +
         quote(s.placement == DataPlacement::both_initial ? "both_initial" : "forward_backward") + "\n";
  out += "zero_tol = " + fmt(s.zero_tol) + "\n";
  out += "tolerance = " + fmt(s.tolerance) + "\n";
  out += "max_refinements = " + std::to_string(s.max_refinements) + "\n";

  const AuditConfig& a = f.audit;
  out += "\n[audit]\n";
  out += "q = " + fmt(a.settings.q) + "\n";
  out += "subset_samples = " + std::to_string(a.settings.subset_samples) + "\n";
  out += "seed = " + std::to_string(a.settings.seed) + "\n";
  out += "a_infty_cap = " + fmt(a.settings.a_infty_cap) + "\n";
  out += "kappa_cap = " + fmt(a.settings.kappa_cap) + "\n";
  out += "rh_cap = " + fmt(a.settings.rh_cap) + "\n";
  out += "h4_cap = " + fmt(a.settings.h4_cap) + "\n";
  out += "delta_grid = " + list(a.settings.delta_grid) + "\n";
  if (!a.settings.eps_list.empty()) out += "eps_list = " + list(a.settings.eps_list) + "\n";
  if (!a.centers.empty()) {
    std::vector<double> flat;
    for (const Point& p : a.centers) {
      flat.push_back(p.x);
      if (g.dim() == 2) flat.push_back(p.y);
    }
    out += "centers = " + list(flat) + "\n";
  }
  out += "r_min = " + fmt(a.r_min) + "\n";
  out += "r_max = " + fmt(a.r_max) + "\n";
  out += "random_nodes = " + std::to_string(a.random_nodes) + "\n";

  const QueryConfig& q = f.queries;
  out += "\n[queries]\n";
  if (!q.point.empty()) out += "point = " + list(q.point) + "\n";
  out += "time = " + fmt(q.time) + "\n";
  out += "rho = " + fmt(q.rho) + "\n";
  out += "theta = " + fmt(q.theta) + "\n";
  out += "omega = " + fmt(q.omega) + "\n";
  out += "harnack_case = " + quote(q.harnack_case) + "\n";
  if (!q.holder_radii.empty()) out += "holder_radii = " + list(q.holder_radii) + "\n";
  out += "positivity_case = " + quote(q.positivity_case) + "\n";
  out += "h_level = " + fmt(q.h_level) + "\n";
  out += "beta = " + fmt(q.beta) + "\n";
  out += "beta_tilde = " + fmt(q.beta_tilde) + "\n";
  out += "theta_hat = " + fmt(q.theta_hat) + "\n";
  out += "linfty_case = " + quote(q.linfty_case) + "\n";
  out += "linfty_radius = " + fmt(q.linfty_radius) + "\n";
  out += "linfty_beta = " + fmt(q.linfty_beta) + "\n";
  out += "levels = " + std::to_string(q.levels) + "\n";
  out += "refinement = " + quote(q.refinement) + "\n";
  return out;
}

BallFamily audit_family(const ScenarioFile& f) {
  const GridDomain& g = f.scenario.grid;
  const auto o = g.origin();
  const auto e = g.extent();
  const double side = g.dim() == 2 ? std::min(e[0], e[1]) : e[0];
  std::vector<Point> centers = f.audit.centers;
  if (centers.empty()) centers.push_back({o[0] + 0.5 * e[0], g.dim() == 2 ? o[1] + 0.5 * e[1] : 0.0});
  const double r_max = f.audit.r_max > 0.0 ? f.audit.r_max : 0.25 * side;
  double cell = g.cell_size(0);
  if (g.dim() == 2) cell = std::max(cell, g.cell_size(1));
  const double r_min = f.audit.r_min > 0.0 ? f.audit.r_min : std::min(2.0 * cell, 0.5 * r_max);
  BallFamily fam = BallFamily::dyadic(centers, r_min, r_max);
  if (f.audit.random_nodes > 0) fam.add_random_nodes(g, f.audit.random_nodes, f.audit.settings.seed);
  return fam;
}

Point query_point(const ScenarioFile& f) {
  const GridDomain& g = f.scenario.grid;
  const auto& p = f.queries.point;
  if (!p.empty()) return {p[0], p.size() > 1 ? p[1] : 0.0};
  const auto o = g.origin();
  const auto e = g.extent();
  return {o[0] + 0.5 * e[0], g.dim() == 2 ? o[1] + 0.5 * e[1] : 0.0};
}

double query_time(const ScenarioFile& f) {
  return f.queries.time > 0.0 ? f.queries.time : 0.5 * f.scenario.grid.final_time();
}

double query_rho(const ScenarioFile& f) {
  if (f.queries.rho > 0.0) return f.queries.rho;
  const auto e = f.scenario.grid.extent();
  return 0.05 * (f.scenario.grid.dim() == 2 ? std::min(e[0], e[1]) : e[0]);
}

std::string config_hash(const ScenarioFile& f) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : serialize_scenario(f)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mixlab
