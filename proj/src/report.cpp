#include "mixlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixlab/error.hpp"

namespace mixlab {

namespace {

Json ball(const Ball& b) { return {{"center", {b.center.x, b.center.y}}, {"radius", b.radius}}; }

Json measured(const Measured& m) {
  return {{"value", number(m.value)}, {"witness", ball(m.witness)}, {"family_size", m.family_size}};
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    // Scalars only; nested tables stay in the JSON.
    if (std::all_of(j.begin(), j.end(), [](const Json& x) { return x.is_number(); }) && j.size() <= 4)
      for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else if (!j.is_null()) {
    out.emplace_back(prefix, j.dump());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json to_json(const WeightAudit& a) {
  Json h5 = Json::array();
  for (const auto& [eps, m] : a.h5) h5.push_back({number(eps), number(m)});
  return {
      {"K1", measured(a.K1)},
      {"K2", measured(a.K2)},
      {"K3", {{"K", number(a.K3.K)}, {"varsigma", number(a.K3.varsigma)}, {"within_cap", a.K3.within_cap},
              {"family_size", a.K3.family_size}}},
      {"doubling_lambda", measured(a.doubling_lambda)},
      {"doubling_mu_lambda_abs", measured(a.doubling_mu_lambda_abs)},
      {"reverse_holder", {{"delta", number(a.rh.delta)}, {"c_rh", number(a.rh.c_rh)}}},
      {"h4", {{"q", number(a.h4.q)}, {"line", a.h4.line}, {"witness", ball(a.h4.witness)}}},
      {"h5", {{"decay", h5}, {"intercept", number(a.h5_intercept)}, {"cell_area", number(a.cell_area)}}},
      {"kappa_tau", {{"kappa", number(a.kt.kappa)}, {"tau", number(a.kt.tau)}}},
      {"hp2_prime", {{"feasible", a.hp2_feasible}, {"alpha", number(a.hp2.alpha)},
                     {"q_tilde", number(a.hp2.q_tilde)}, {"K2_tilde", number(a.hp2.K2_tilde)},
                     {"delta", number(a.hp2.delta)}}},
      {"failures", a.failures},
  };
}

Json to_json(const SolveReport& r) {
  Json energy = Json::array();
  for (double e : r.slice_energy) energy.push_back(number(e));
  return {{"residual", number(r.residual)},
          {"system_size", r.system_size},
          {"nonzeros", r.nonzeros},
          {"iterations", r.iterations},
          {"slice_energy", energy}};
}

Json to_json(const EnergyReport& r, bool with_records) {
  Json j = {{"gamma", number(r.gamma)},
            {"gamma_plus", number(r.gamma_plus)},
            {"gamma_minus", number(r.gamma_minus)},
            {"in_dg_plus", r.in_dg_plus},
            {"in_dg_minus", r.in_dg_minus},
            {"records", r.records.size()}};
  if (r.worst >= 0) {
    const auto& w = r.records[r.worst];
    j["worst"] = {{"kind", to_string(w.kind)}, {"sign", w.sign}, {"k", number(w.k)}, {"eps", number(w.eps)},
                  {"theta_tilde", number(w.theta_tilde)}, {"lhs", number(w.lhs)}, {"rhs", number(w.rhs)},
                  {"implied_gamma", number(w.implied_gamma)}};
  }
  if (with_records) {
    Json rec = Json::array();
    for (const auto& w : r.records)
      rec.push_back({to_string(w.kind), w.sign, number(w.k), number(w.eps), number(w.lhs), number(w.rhs),
                     number(w.free_terms), number(w.implied_gamma)});
    j["table"] = rec;
  }
  return j;
}

Json to_json(const LinftyResult& r) {
  return {{"ess_sup", number(r.ess_sup)}, {"energy", number(r.energy)}, {"c_inf", number(r.c_inf)}};
}

Json to_json(const HarnackReport& r) {
  Json j = {{"value_at_point", number(r.value_at_point)},
            {"inf_over_target", number(r.inf_over_target)},
            {"sup_over_target", number(r.sup_over_target)},
            {"ratio", number(r.ratio)},
            {"reversed_ratio", number(r.reversed_ratio)},
            {"target", r.target},
            {"target_cells", r.target_cells},
            {"levels", {r.n0, r.n1}},
            {"h_rho", number(r.h_rho)},
            {"h_4rho", number(r.h_4rho)}};
  return j;
}

Json to_json(const Expansion& e) {
  return {{"lambda_hat", number(e.lambda_hat)}, {"rung", e.rung}, {"min_ratio", number(e.min_ratio)},
          {"target_cells", e.target_cells}, {"levels", {e.n0, e.n1}}};
}

Json to_json(const HolderFit& f) {
  Json table = Json::array();
  for (std::size_t i = 0; i < f.rho.size(); ++i)
    table.push_back({number(f.rho[i]), number(f.osc[i]), number(f.window[i])});
  return {{"alpha", number(f.alpha)},
          {"r_squared", number(f.r_squared)},
          {"capped", f.capped},
          {"alpha_from_gamma", number(f.alpha_from_gamma)},
          {"rho_osc_window", table}};
}

Json to_json(const MaxPrinciple& m) {
  return {{"verdict", to_string(m.verdict)},
          {"value", number(m.value)},
          {"neighborhood_max", number(m.neighborhood_max)},
          {"deviation", number(m.deviation)},
          {"witness", {m.witness_cell, m.witness_level}},
          {"reason", m.reason}};
}

Json provenance(const ScenarioFile& f, int levels) {
  const GridDomain& g = f.scenario.grid;
  return {{"scenario", f.scenario.name},
          {"schema", f.schema},
          {"config_hash", config_hash(f)},
          {"grid", {{"dim", g.dim()}, {"nx", g.nx()}, {"ny", g.ny()}, {"steps", g.time_steps()}}},
          {"levels", levels},
          {"refinement", f.queries.refinement}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
  const auto dir = std::filesystem::path(path).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
  out << text;
}

Json consolidate(const std::string& run_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(run_dir)) throw Error(ErrorKind::InvalidInput, "no run directory " + run_dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(run_dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    if (e.path().filename() == "report.json") continue;
    files.push_back(e.path());
  }
  if (files.empty()) throw Error(ErrorKind::InvalidInput, "run directory " + run_dir + " holds no records");
  std::sort(files.begin(), files.end());
  Json out = {{"records", Json::array()}};
  for (const auto& p : files) {
    std::ifstream in(p);
    Json rec;
    try {
      rec = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorKind::InvalidInput, "bad record " + p.string() + ": " + e.what());
    }
    rec["file"] = fs::relative(p, run_dir).generic_string();
    out["records"].push_back(rec);
  }
  return out;
}

std::string summary_csv(const Json& c) {
  std::ostringstream out;
  out << "file,command,scenario,level,key,value\n";
  for (const auto& rec : c.at("records")) {
    const std::string file = rec.value("file", "");
    const std::string cmd = rec.value("command", "");
    const std::string scen = rec.contains("provenance") ? rec["provenance"].value("scenario", "") : "";
    if (!rec.contains("levels") || !rec["levels"].is_array()) continue;
    for (const auto& lv : rec["levels"]) {
      std::vector<std::pair<std::string, std::string>> cells;
      flatten(lv, "", cells);
      const std::string level = lv.contains("level") ? lv["level"].dump() : "";
      for (const auto& [k, v] : cells) {
        if (k == "level") continue;
        out << csv_field(file) << ',' << csv_field(cmd) << ',' << csv_field(scen) << ',' << level << ','
            << csv_field(k) << ',' << csv_field(v) << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace mixlab
