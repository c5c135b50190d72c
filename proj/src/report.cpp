#include "skewflow/report.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace skewflow {

std::string version_string() { return "0.1.0"; }

std::string config_hash(const ordered_json& canonical) {
  const std::string s = canonical.dump();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {
ordered_json check_json(const CheckReport& c, bool with_runtime) {
  ordered_json j;
  j["name"] = c.name;
  j["parameters"] = c.parameters;
  j["statistic"] = c.statistic;
  j["threshold"] = c.threshold;
  j["pass"] = c.pass;
  if (with_runtime) j["runtime_sec"] = c.runtime_sec;
  return j;
}
}  // namespace

std::string summary_string(const RunReport& r) {
  ordered_json j;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  j["version"] = version_string();
  j["config_hash"] = config_hash(r.config_echo);
  j["config"] = r.config_echo;
  j["pass"] = r.pass();
  j["checks"] = ordered_json::array();
  for (const auto& c : r.checks) j["checks"].push_back(check_json(c, false));
  j["extras"] = r.extras;
  return j.dump(2) + "\n";
}

void write_reports(const RunReport& r, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "checks");
  {
    std::ofstream f(fs::path(out_dir) / "summary.json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out_dir + "/summary.json");
    f << summary_string(r);
  }
  {
    ordered_json meta;
    meta["version"] = version_string();
    meta["config_hash"] = config_hash(r.config_echo);
    double total = 0.0;
    meta["check_runtimes_sec"] = ordered_json::object();
    for (const auto& c : r.checks) {
      meta["check_runtimes_sec"][c.name] = c.runtime_sec;
      total += c.runtime_sec;
    }
    meta["total_runtime_sec"] = total;
    std::ofstream f(fs::path(out_dir) / "run_meta.json", std::ios::binary);
    f << meta.dump(2) << "\n";
  }
  int idx = 0;
  for (const auto& c : r.checks) {
    char prefix[16];
    std::snprintf(prefix, sizeof(prefix), "%02d-", idx++);
    std::string fname = c.name;
    for (char& ch : fname)
      if (!isalnum(static_cast<unsigned char>(ch))) ch = '_';
    std::ofstream f(fs::path(out_dir) / "checks" / (prefix + fname + ".json"),
                    std::ios::binary);
    f << check_json(c, true).dump(2) << "\n";
  }
}

}  // namespace skewflow
