#pragma once
// Machine-readable run reports. summary.json is byte-deterministic for a
// given config+seed (insertion-ordered keys, shortest round-trip floats, no
// timing or host fields); runtimes live in run_meta.json and checks/*.json.
#include <string>
#include <vector>

#include "json.hpp"

namespace skewflow {

using ordered_json = nlohmann::ordered_json;

struct CheckReport {
  std::string name;
  ordered_json parameters;  // small diagnostic key/value details
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  double runtime_sec = 0.0;  // volatile — excluded from summary.json
};

struct RunReport {
  std::string experiment;
  uint64_t seed = 0;
  ordered_json config_echo;
  std::vector<CheckReport> checks;
  ordered_json extras;  // experiment tables; deterministic content only
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

std::string version_string();
std::string config_hash(const ordered_json& canonical);  // FNV-1a, hex

// deterministic serialization of everything except runtimes
std::string summary_string(const RunReport& r);

// writes summary.json, run_meta.json and checks/NN-name.json under out_dir
void write_reports(const RunReport& r, const std::string& out_dir);

}  // namespace skewflow
