#include "skewflow/config.hpp"

#include <algorithm>
#include <set>

namespace skewflow {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

const ordered_json& need(const ordered_json& j, const std::string& path,
                         const char* key) {
  if (!j.contains(key)) fail(path + "." + key, "missing required field");
  return j.at(key);
}

void reject_unknown(const ordered_json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end())
      fail(path + "." + it.key(), "unknown field");
  }
}

double get_num(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double opt_num(const ordered_json& j, const std::string& path, const char* key,
               double dflt) {
  if (!j.contains(key)) return dflt;
  return get_num(j.at(key), path + "." + key);
}

std::string get_str(const ordered_json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_vec(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> v;
  for (size_t i = 0; i < j.size(); ++i)
    v.push_back(get_num(j.at(i), path + "[" + std::to_string(i) + "]"));
  return v;
}

RhoSpec parse_rho(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  RhoSpec rho;
  const std::string kind = get_str(need(j, path, "kind"), path + ".kind");
  if (kind == "constant") {
    reject_unknown(j, path, {"kind", "c"});
    rho.kind = RhoKind::constant;
    rho.c = opt_num(j, path, "c", 1.0);
  } else if (kind == "radial_power") {
    reject_unknown(j, path, {"kind", "c", "alpha"});
    rho.kind = RhoKind::radial_power;
    rho.c = opt_num(j, path, "c", 1.0);
    rho.alpha = get_num(need(j, path, "alpha"), path + ".alpha");
  } else if (kind == "log_modified") {
    reject_unknown(j, path, {"kind", "alpha", "alpha_log", "beta_pow", "beta_log"});
    rho.kind = RhoKind::log_modified;
    rho.alpha = get_num(need(j, path, "alpha"), path + ".alpha");
    rho.alpha_log = opt_num(j, path, "alpha_log", 1.0);
    rho.beta_pow = get_num(need(j, path, "beta_pow"), path + ".beta_pow");
    rho.beta_log = opt_num(j, path, "beta_log", 1.0);
  } else {
    fail(path + ".kind", "unknown rho kind '" + kind + "'");
  }
  return rho;
}

Domain parse_domain(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  Domain dom;
  const std::string kind = get_str(need(j, path, "kind"), path + ".kind");
  if (kind == "ball") {
    reject_unknown(j, path, {"kind", "center", "radius"});
    dom.kind = DomainKind::ball;
    dom.center = get_vec(need(j, path, "center"), path + ".center");
    dom.radius = get_num(need(j, path, "radius"), path + ".radius");
    if (!(dom.radius > 0.0)) fail(path + ".radius", "must be positive");
  } else if (kind == "half_space") {
    reject_unknown(j, path, {"kind", "axis", "level", "side"});
    dom.kind = DomainKind::half_space;
    dom.axis = int(opt_num(j, path, "axis", 0));
    dom.level = opt_num(j, path, "level", 0.0);
    dom.side = int(opt_num(j, path, "side", 1));
    if (dom.side != 1 && dom.side != -1) fail(path + ".side", "must be +1 or -1");
  } else if (kind == "polytope") {
    reject_unknown(j, path, {"kind", "normals", "offsets"});
    dom.kind = DomainKind::polytope;
    const ordered_json& ns = need(j, path, "normals");
    if (!ns.is_array() || ns.empty()) fail(path + ".normals", "expected a nonempty array");
    for (size_t i = 0; i < ns.size(); ++i)
      dom.normals.push_back(
          get_vec(ns.at(i), path + ".normals[" + std::to_string(i) + "]"));
    dom.offsets = get_vec(need(j, path, "offsets"), path + ".offsets");
    if (dom.offsets.size() != dom.normals.size())
      fail(path + ".offsets", "size must match normals");
  } else {
    fail(path + ".kind", "unknown domain kind '" + kind + "'");
  }
  return dom;
}

PhiSpec parse_phi(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  PhiSpec phi;
  const std::string kind = get_str(need(j, path, "kind"), path + ".kind");
  if (kind == "uniform") {
    reject_unknown(j, path, {"kind", "c"});
    phi.kind = PhiKind::uniform;
    phi.c = opt_num(j, path, "c", 1.0);
  } else if (kind == "annuli" || kind == "slabs") {
    reject_unknown(j, path,
                   {"kind", "inner_levels", "inner_values", "outer_levels",
                    "outer_values", "m0"});
    phi.kind = kind == "annuli" ? PhiKind::annuli : PhiKind::slabs;
    if (j.contains("inner_levels"))
      phi.inner_levels = get_vec(j.at("inner_levels"), path + ".inner_levels");
    if (j.contains("outer_levels"))
      phi.outer_levels = get_vec(j.at("outer_levels"), path + ".outer_levels");
    phi.inner_values = get_vec(need(j, path, "inner_values"), path + ".inner_values");
    phi.outer_values = get_vec(need(j, path, "outer_values"), path + ".outer_values");
    if (kind == "annuli") phi.m0 = opt_num(j, path, "m0", 1.0);
  } else if (kind == "lipschitz_domain") {
    reject_unknown(j, path, {"kind", "domain", "beta_out"});
    phi.kind = PhiKind::lipschitz_domain;
    phi.domain = parse_domain(need(j, path, "domain"), path + ".domain");
    phi.beta_out = get_num(need(j, path, "beta_out"), path + ".beta_out");
    if (!(phi.beta_out > 0.0 && phi.beta_out < 1.0))
      fail(path + ".beta_out", "must lie in (0,1)");
  } else {
    fail(path + ".kind", "unknown phi kind '" + kind + "'");
  }
  return phi;
}

ordered_json domain_json(const Domain& d) {
  ordered_json j;
  switch (d.kind) {
    case DomainKind::ball:
      j["kind"] = "ball";
      j["center"] = d.center;
      j["radius"] = d.radius;
      break;
    case DomainKind::half_space:
      j["kind"] = "half_space";
      j["axis"] = d.axis;
      j["level"] = d.level;
      j["side"] = d.side;
      break;
    case DomainKind::polytope:
      j["kind"] = "polytope";
      j["normals"] = d.normals;
      j["offsets"] = d.offsets;
      break;
    default:
      j["kind"] = d.kind == DomainKind::full_space ? "full_space" : "punctured_origin";
  }
  return j;
}

}  // namespace

ExperimentConfig parse_config(const ordered_json& j) {
  const std::string path = "config";
  if (!j.is_object()) fail(path, "top level must be an object");
  reject_unknown(j, path,
                 {"experiment", "seed", "weight", "mode", "domain", "sim", "params",
                  "out"});

  ExperimentConfig cfg;
  cfg.experiment = get_str(need(j, path, "experiment"), path + ".experiment");
  static const std::set<std::string> kExperiments = {
      "simulate", "local_time", "revuz",  "bessel",  "a2",     "riesz",
      "s00",      "envelope",   "symmetry", "feller", "kernel_bound", "nash"};
  if (!kExperiments.count(cfg.experiment))
    fail(path + ".experiment", "unknown experiment '" + cfg.experiment + "'");

  const ordered_json& js = need(j, path, "seed");
  if (!js.is_number_integer() && !js.is_number_unsigned())
    fail(path + ".seed", "must be an integer (wall-clock seeding is not supported)");
  cfg.seed = js.get<uint64_t>();

  const ordered_json& jw = need(j, path, "weight");
  if (!jw.is_object()) fail(path + ".weight", "expected an object");
  reject_unknown(jw, path + ".weight", {"dimension", "rho", "phi"});
  cfg.weight.dim = int(opt_num(jw, path + ".weight", "dimension", 3));
  if (cfg.weight.dim < 2 || cfg.weight.dim > 8)
    fail(path + ".weight.dimension", "supported dimensions are 2..8");
  cfg.weight.rho = parse_rho(need(jw, path + ".weight", "rho"), path + ".weight.rho");
  cfg.weight.phi = parse_phi(need(jw, path + ".weight", "phi"), path + ".weight.phi");

  if (j.contains("mode")) {
    const std::string m = get_str(j.at("mode"), path + ".mode");
    if (m == "free")
      cfg.mode = Mode::free_motion;
    else if (m == "killed")
      cfg.mode = Mode::killed;
    else if (m == "reflected")
      cfg.mode = Mode::reflected;
    else
      fail(path + ".mode", "expected free|killed|reflected");
  }
  cfg.sim.mode = cfg.mode;

  if (cfg.mode == Mode::reflected) {
    cfg.sim.domain = parse_domain(need(j, path, "domain"), path + ".domain");
  } else if (j.contains("domain")) {
    fail(path + ".domain", "only valid in reflected mode");
  }

  if (j.contains("sim")) {
    const ordered_json& s = j.at("sim");
    if (!s.is_object()) fail(path + ".sim", "expected an object");
    reject_unknown(s, path + ".sim",
                   {"dt", "horizon", "drift_cap", "skew_band", "observer_band",
                    "kill_floor_scale", "interface_threshold"});
    cfg.sim.dt = opt_num(s, path + ".sim", "dt", cfg.sim.dt);
    cfg.sim.horizon = opt_num(s, path + ".sim", "horizon", cfg.sim.horizon);
    cfg.sim.drift_cap = opt_num(s, path + ".sim", "drift_cap", cfg.sim.drift_cap);
    cfg.sim.skew_band = opt_num(s, path + ".sim", "skew_band", cfg.sim.skew_band);
    cfg.sim.observer_band =
        opt_num(s, path + ".sim", "observer_band", cfg.sim.observer_band);
    cfg.sim.kill_floor_scale =
        opt_num(s, path + ".sim", "kill_floor_scale", cfg.sim.kill_floor_scale);
    cfg.sim.interface_threshold =
        opt_num(s, path + ".sim", "interface_threshold", cfg.sim.interface_threshold);
    if (!(cfg.sim.dt > 0.0)) fail(path + ".sim.dt", "must be positive");
    if (cfg.sim.horizon < cfg.sim.dt) fail(path + ".sim.horizon", "must be >= dt");
    if (!(cfg.sim.drift_cap > 0.0)) fail(path + ".sim.drift_cap", "must be positive");
  }

  if (j.contains("params")) {
    if (!j.at("params").is_object()) fail(path + ".params", "expected an object");
    cfg.params = j.at("params");
  }
  if (j.contains("out")) cfg.out_dir = get_str(j.at("out"), path + ".out");

  try {
    // a2 probes may hold weights outside the simulation range on purpose
    validate(cfg.weight, /*for_simulation=*/false);
  } catch (const std::invalid_argument& e) {
    fail(path + ".weight", e.what());
  }
  return cfg;
}

ordered_json canonical_config(const ExperimentConfig& cfg) {
  ordered_json j;
  j["experiment"] = cfg.experiment;
  j["seed"] = cfg.seed;

  ordered_json w;
  w["dimension"] = cfg.weight.dim;
  ordered_json rho;
  switch (cfg.weight.rho.kind) {
    case RhoKind::constant:
      rho["kind"] = "constant";
      rho["c"] = cfg.weight.rho.c;
      break;
    case RhoKind::radial_power:
      rho["kind"] = "radial_power";
      rho["c"] = cfg.weight.rho.c;
      rho["alpha"] = cfg.weight.rho.alpha;
      break;
    case RhoKind::log_modified:
      rho["kind"] = "log_modified";
      rho["alpha"] = cfg.weight.rho.alpha;
      rho["alpha_log"] = cfg.weight.rho.alpha_log;
      rho["beta_pow"] = cfg.weight.rho.beta_pow;
      rho["beta_log"] = cfg.weight.rho.beta_log;
      break;
  }
  w["rho"] = rho;
  ordered_json phi;
  switch (cfg.weight.phi.kind) {
    case PhiKind::uniform:
      phi["kind"] = "uniform";
      phi["c"] = cfg.weight.phi.c;
      break;
    case PhiKind::annuli:
    case PhiKind::slabs:
      phi["kind"] = cfg.weight.phi.kind == PhiKind::annuli ? "annuli" : "slabs";
      phi["inner_levels"] = cfg.weight.phi.inner_levels;
      phi["inner_values"] = cfg.weight.phi.inner_values;
      phi["outer_levels"] = cfg.weight.phi.outer_levels;
      phi["outer_values"] = cfg.weight.phi.outer_values;
      if (cfg.weight.phi.kind == PhiKind::annuli) phi["m0"] = cfg.weight.phi.m0;
      break;
    case PhiKind::lipschitz_domain:
      phi["kind"] = "lipschitz_domain";
      phi["domain"] = domain_json(cfg.weight.phi.domain);
      phi["beta_out"] = cfg.weight.phi.beta_out;
      break;
  }
  w["phi"] = phi;
  j["weight"] = w;

  j["mode"] = cfg.mode == Mode::free_motion
                  ? "free"
                  : (cfg.mode == Mode::killed ? "killed" : "reflected");
  if (cfg.mode == Mode::reflected) j["domain"] = domain_json(cfg.sim.domain);

  ordered_json s;
  s["dt"] = cfg.sim.dt;
  s["horizon"] = cfg.sim.horizon;
  s["drift_cap"] = cfg.sim.drift_cap;
  s["skew_band"] = cfg.sim.skew_band;
  s["observer_band"] = cfg.sim.observer_band;
  s["kill_floor_scale"] = cfg.sim.kill_floor_scale;
  s["interface_threshold"] = cfg.sim.interface_threshold;
  j["sim"] = s;
  j["params"] = cfg.params;
  return j;
}

}  // namespace skewflow
