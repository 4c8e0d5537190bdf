#pragma once

#include <string>
#include <vector>

#include "mixlab/solver.hpp"
#include "mixlab/weight_lab.hpp"

namespace mixlab {

constexpr int kSchemaVersion = 1;

struct AuditConfig {
  AuditSettings settings;
  std::vector<Point> centers;  // empty: domain centre
  double r_min = 0.0;          // 0: two cells
  double r_max = 0.0;          // 0: a quarter of the shortest side
  int random_nodes = 8;

  bool operator==(const AuditConfig&) const = default;
};

// Defaults for the verify subcommands; zero or empty means "pick from the grid".
struct QueryConfig {
  std::vector<double> point;  // x or x, y
  double time = 0.0;
  double rho = 0.0;
  double theta = 1.0;
  double omega = 1.0;
  std::string harnack_case = "i";
  std::vector<double> holder_radii;
  std::string positivity_case = "plus";
  double h_level = 0.0;
  double beta = 1.0;
  double beta_tilde = 1.0;
  double theta_hat = 0.5;
  std::string linfty_case = "i";
  double linfty_radius = 0.0;
  double linfty_beta = 1.0;
  int levels = 1;
  std::string refinement = "diffusive";

  bool operator==(const QueryConfig&) const = default;
};

struct ScenarioFile {
  int schema = kSchemaVersion;
  Scenario scenario;
  AuditConfig audit;
  QueryConfig queries;
  double final_time = 1.0;

  bool operator==(const ScenarioFile&) const = default;
};

// csv expressions are read relative to base_dir.
ScenarioFile parse_scenario(const std::string& text, const std::string& base_dir = ".");
ScenarioFile load_scenario(const std::string& path);
std::string serialize_scenario(const ScenarioFile& f);

BallFamily audit_family(const ScenarioFile& f);
Point query_point(const ScenarioFile& f);
double query_time(const ScenarioFile& f);
double query_rho(const ScenarioFile& f);

// FNV-1a of the canonical text.
std::string config_hash(const ScenarioFile& f);

}  // namespace mixlab
