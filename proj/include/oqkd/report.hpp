#pragma once

#include <string>

#include <json.hpp>

#include "oqkd/engine.hpp"

namespace oqkd {

using Json = nlohmann::ordered_json;

// One batch experiment: trials of a fixed configuration under one strategy.
// Field names are part of the external report contract (see README).
struct ExperimentSpec {
  int protocol = 2;
  int n = 100;
  int trials = 1;
  std::uint64_t seed = 0;
  bool seed_set = false;  // auto-generated and echoed when unset
  std::string attack = "none";
  std::string noise = "none";
  std::string grouping = "correlated";
  double checking_fraction = 0.5;
  double decoy_ratio = 0.25;
  double error_threshold = 0.0;
  std::string out_path;        // empty = stdout
  std::string format = "json";  // json | csv | text

  void validate() const;
  ProtocolConfig to_config() const;
  Json to_json() const;
  static ExperimentSpec from_json(const Json& j);
};

// "none", "cd:<phi>", "cr:<theta>"/"cr:random", "pauli-z:<pI>",
// "pauli-x:<pI>", "pauli-zx:<pI>", "pauli-full:<pI>,<pZ>,<pX>,<pZX>",
// "pd:<p>", "ad:<p>"
NoiseMode parse_noise(const std::string& descriptor);

// Executes the trials (seeding the spec first if needed) and assembles the
// machine-readable report. Identical spec + seed give byte-identical output.
Json run_experiment(ExperimentSpec& spec);

Json attack_table_doc();
Json efficiency_table_doc();

std::string report_csv(const Json& report);
std::string report_text(const Json& report);
std::string attack_table_text();
std::string efficiency_table_text();

}  // namespace oqkd
