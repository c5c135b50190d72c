#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "skewflow/config.hpp"
#include "skewflow/presets.hpp"
#include "skewflow/report.hpp"

using namespace skewflow;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json minimal_config() {
  return ordered_json::parse(R"({
    "experiment": "simulate",
    "seed": 7,
    "weight": {
      "dimension": 3,
      "rho": {"kind": "radial_power", "alpha": 1.0},
      "phi": {"kind": "uniform"}
    },
    "sim": {"dt": 0.001, "horizon": 1.0},
    "params": {"n_paths": 10, "x0": [1.0, 0.0, 0.0]}
  })");
}

}  // namespace

TEST_CASE("minimal config parses with documented defaults") {
  const ExperimentConfig cfg = parse_config(minimal_config());
  CHECK(cfg.experiment == "simulate");
  CHECK(cfg.seed == 7);
  CHECK(cfg.workers == 1);
  CHECK(cfg.weight.dim == 3);
  CHECK(cfg.weight.rho.kind == RhoKind::radial_power);
  CHECK(cfg.weight.rho.alpha == doctest::Approx(1.0));
  CHECK(cfg.mode == Mode::free_motion);
  CHECK(cfg.sim.dt == doctest::Approx(1e-3));
  CHECK(cfg.sim.horizon == doctest::Approx(1.0));
  CHECK(cfg.sim.drift_cap == doctest::Approx(1e3));
  CHECK(cfg.out_dir.empty());
}

TEST_CASE("config rejection messages name the offending field") {
  auto expect_error = [](ordered_json j, const char* needle) {
    try {
      parse_config(j);
      FAIL_CHECK("expected ConfigError mentioning " << needle);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  ordered_json j = minimal_config();
  j.erase("seed");
  expect_error(j, "seed");

  j = minimal_config();
  j["seed"] = 1.5;
  expect_error(j, "seed");

  j = minimal_config();
  j["experiment"] = "teleport";
  expect_error(j, "experiment");

  j = minimal_config();
  j["weight"]["rho"]["kind"] = "sqrt";
  expect_error(j, "kind");

  j = minimal_config();
  j["weight"]["dimension"] = 1;
  expect_error(j, "dimension");

  j = minimal_config();
  j["typo_section"] = 1;
  expect_error(j, "typo_section");

  // a reflecting domain only makes sense in reflected mode
  j = minimal_config();
  j["domain"] = {{"kind", "ball"}, {"center", {0.0, 0.0, 0.0}}, {"radius", 1.0}};
  expect_error(j, "domain");
}

TEST_CASE("reflected mode carries its domain into the sim config") {
  ordered_json j = minimal_config();
  j["weight"]["rho"] = {{"kind", "constant"}};
  j["mode"] = "reflected";
  j["domain"] = {{"kind", "ball"}, {"center", {0.0, 0.0, 0.0}}, {"radius", 1.0}};
  const ExperimentConfig cfg = parse_config(j);
  CHECK(cfg.mode == Mode::reflected);
  CHECK(cfg.sim.mode == Mode::reflected);
  CHECK(cfg.sim.domain.kind == DomainKind::ball);
  CHECK(cfg.sim.domain.radius == doctest::Approx(1.0));
}

TEST_CASE("canonical form is stable under key reordering") {
  ordered_json a = minimal_config();
  ordered_json b = ordered_json::object();
  // insert the same data in reverse order
  b["params"] = a["params"];
  b["sim"] = a["sim"];
  b["weight"] = a["weight"];
  b["seed"] = a["seed"];
  b["experiment"] = a["experiment"];
  const ordered_json ca = canonical_config(parse_config(a));
  const ordered_json cb = canonical_config(parse_config(b));
  CHECK(ca.dump() == cb.dump());
  CHECK(config_hash(ca) == config_hash(cb));

  b["seed"] = 8;
  CHECK(config_hash(canonical_config(parse_config(b))) != config_hash(ca));
}

TEST_CASE("summary serialization is byte-stable and runtime-free") {
  RunReport r;
  r.experiment = "simulate";
  r.seed = 7;
  r.config_echo = canonical_config(parse_config(minimal_config()));
  CheckReport c;
  c.name = "toy";
  c.statistic = 0.5;
  c.threshold = 1.0;
  c.pass = true;
  c.runtime_sec = 12.34;
  r.checks.push_back(c);
  r.extras["note"] = "x";

  const std::string s1 = summary_string(r);
  r.checks[0].runtime_sec = 99.0;  // wall-clock noise must not leak into the summary
  const std::string s2 = summary_string(r);
  CHECK(s1 == s2);
  CHECK(s1.find("runtime") == std::string::npos);
  CHECK(s1.find("toy") != std::string::npos);

  r.checks[0].statistic = 0.25;
  CHECK(summary_string(r) != s1);
}

TEST_CASE("report files land in the requested directory") {
  RunReport r;
  r.experiment = "simulate";
  r.seed = 1;
  r.config_echo = canonical_config(parse_config(minimal_config()));
  const auto dir = std::filesystem::temp_directory_path() / "skewflow_report_test";
  std::filesystem::remove_all(dir);
  write_reports(r, dir.string());
  CHECK(std::filesystem::exists(dir / "summary.json"));
  std::ifstream in(dir / "summary.json");
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(body == summary_string(r));
  std::filesystem::remove_all(dir);
}

TEST_CASE("every preset in the catalog parses cleanly") {
  const auto& cat = presets();
  CHECK(cat.size() >= 20);
  for (const Preset& p : cat) {
    INFO("preset ", p.name);
    CHECK_NOTHROW(parse_config(p.config));
    CHECK_FALSE(p.description.empty());
    CHECK(find_preset(p.name) == &p);
  }
  CHECK(find_preset("no-such-preset") == nullptr);
}
