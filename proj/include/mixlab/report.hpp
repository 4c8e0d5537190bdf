#pragma once

#include <json.hpp>
#include <string>

#include "mixlab/degiorgi.hpp"
#include "mixlab/harnack_lab.hpp"
#include "mixlab/scenario.hpp"
#include "mixlab/solver.hpp"
#include "mixlab/weight_lab.hpp"

namespace mixlab {

using Json = nlohmann::ordered_json;

// Non-finite numbers become strings "inf", "-inf", "nan".
Json number(double v);

Json to_json(const WeightAudit& a);
Json to_json(const SolveReport& r);
Json to_json(const EnergyReport& r, bool with_records = false);
Json to_json(const LinftyResult& r);
Json to_json(const HarnackReport& r);
Json to_json(const Expansion& e);
Json to_json(const HolderFit& f);
Json to_json(const MaxPrinciple& m);

Json provenance(const ScenarioFile& f, int levels);

// Pretty JSON with a trailing newline.
std::string dump(const Json& j);
void write_text(const std::string& path, const std::string& text);

// Every *.json under run_dir (sorted by path) gathered into one document.
Json consolidate(const std::string& run_dir);
// One row per record and per grid level.
std::string summary_csv(const Json& consolidated);

}  // namespace mixlab
