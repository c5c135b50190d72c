#include "skewflow/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewflow/local_time.hpp"
#include "skewflow/potentials.hpp"
#include "skewflow/quadrature.hpp"
#include "skewflow/semigroup.hpp"
#include "skewflow/stats.hpp"

namespace skewflow {
namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double sec() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// ------------------------------------------------------------- param access

[[noreturn]] void bad(const std::string& msg) { throw ConfigError("params: " + msg); }

void allow_keys(const ordered_json& p, std::initializer_list<const char*> keys,
                const std::string& where) {
  for (auto it = p.begin(); it != p.end(); ++it) {
    bool ok = false;
    for (const char* k : keys)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) bad("unknown key " + where + "." + it.key());
  }
}

double num_or(const ordered_json& p, const char* k, double dflt) {
  if (!p.contains(k)) return dflt;
  if (!p[k].is_number()) bad(std::string(k) + " must be a number");
  return p[k].get<double>();
}

double num_req(const ordered_json& p, const char* k) {
  if (!p.contains(k)) bad(std::string(k) + " is required");
  return num_or(p, k, 0.0);
}

size_t count_or(const ordered_json& p, const char* k, size_t dflt) {
  const double v = num_or(p, k, double(dflt));
  if (v < 0.0 || v != std::floor(v)) bad(std::string(k) + " must be a nonnegative integer");
  return size_t(v);
}

std::string str_or(const ordered_json& p, const char* k, const std::string& dflt) {
  if (!p.contains(k)) return dflt;
  if (!p[k].is_string()) bad(std::string(k) + " must be a string");
  return p[k].get<std::string>();
}

std::vector<double> list_or(const ordered_json& p, const char* k,
                            const std::vector<double>& dflt) {
  if (!p.contains(k)) return dflt;
  if (!p[k].is_array() || p[k].empty()) bad(std::string(k) + " must be a nonempty array");
  std::vector<double> v;
  for (const auto& e : p[k]) {
    if (!e.is_number()) bad(std::string(k) + " must contain numbers only");
    v.push_back(e.get<double>());
  }
  return v;
}

Vec vec_or(const ordered_json& p, const char* k, size_t d, const Vec& dflt) {
  const Vec v = list_or(p, k, dflt);
  if (v.size() != d) bad(std::string(k) + " must have dimension " + std::to_string(d));
  return v;
}

std::vector<Vec> points_or(const ordered_json& p, const char* k, size_t d,
                           const std::vector<Vec>& dflt) {
  if (!p.contains(k)) return dflt;
  if (!p[k].is_array() || p[k].empty()) bad(std::string(k) + " must be a nonempty array");
  std::vector<Vec> pts;
  for (const auto& e : p[k]) {
    if (!e.is_array()) bad(std::string(k) + " must be an array of points");
    Vec x;
    for (const auto& c : e) {
      if (!c.is_number()) bad(std::string(k) + " points must be numeric");
      x.push_back(c.get<double>());
    }
    if (x.size() != d) bad(std::string(k) + " points must have dimension " + std::to_string(d));
    pts.push_back(std::move(x));
  }
  return pts;
}

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

CheckReport& add_check(RunReport& r, std::string name, double stat, double thr,
                       bool pass, ordered_json params = ordered_json::object()) {
  CheckReport c;
  c.name = std::move(name);
  c.statistic = stat;
  c.threshold = thr;
  c.pass = pass;
  c.parameters = std::move(params);
  r.checks.push_back(std::move(c));
  return r.checks.back();
}

ordered_json vec_json(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Bump parse_bump(const ordered_json& p, const char* k, size_t d, const Bump& dflt) {
  if (!p.contains(k)) return dflt;
  const ordered_json& o = p[k];
  if (!o.is_object()) bad(std::string(k) + " must be an object");
  allow_keys(o, {"center", "radius", "height"}, k);
  Bump b;
  b.center = vec_or(o, "center", d, dflt.center);
  b.radius = num_or(o, "radius", dflt.radius);
  b.height = num_or(o, "height", dflt.height);
  if (!(b.radius > 0.0)) bad(std::string(k) + ".radius must be positive");
  return b;
}

Interface make_level_interface(InterfaceGeom geom, double level, double g_lo, double g_hi) {
  Interface f;
  f.geom = geom;
  f.level = level;
  f.gamma_lo = g_lo;
  f.gamma_hi = g_hi;
  f.beta = g_hi / (g_lo + g_hi);
  f.revuz_weight = 0.5 * (g_lo + g_hi);
  return f;
}

// observer-ledger slot for the i-th entry of cfg.observer_levels: dynamic
// interfaces come first, the boundary ledger (reflected mode) last
size_t observer_slot(const Stepper& st, size_t i) {
  const size_t n_obs = st.config().observer_levels.size();
  const size_t tail = st.boundary_slot() >= 0 ? 1 : 0;
  return st.n_ledgers() - tail - n_obs + i;
}

// ----------------------------------------------------------------- simulate

struct SimBatch {
  size_t n = 0, d = 0, nled = 0, nbins = 0;
  std::vector<double> endpoints;  // n × d
  std::vector<int> status;        // n
  std::vector<double> ledger;     // n × nled, per-path totals
  std::vector<double> bins;       // n × nbins thinned radial occupation counts
};

struct SimObs {
  SimBatch* b = nullptr;
  size_t i = 0;
  size_t k0 = 0, kstride = 1;  // occupation sampling plan (steps)
  const Domain* dom = nullptr;
  void step(const StepView& v) {
    if (b->nled) {
      double* led = &b->ledger[i * b->nled];
      for (size_t l = 0; l < v.n_ledgers; ++l) led[l] += v.ledger_inc[l];
    }
    if (b->nbins && v.k + 1 >= k0 && (v.k + 1 - k0) % kstride == 0) {
      const double r = dist(v.post, dom->center.data(), v.dim);
      const double u = std::pow(std::min(1.0, r / dom->radius), double(v.dim));
      const size_t bin = std::min(b->nbins - 1, size_t(u * double(b->nbins)));
      b->bins[i * b->nbins + bin] += 1.0;
    }
  }
  void finish(const Stepper::State& s) {
    for (size_t j = 0; j < s.x.size(); ++j) b->endpoints[i * b->d + j] = s.x[j];
    b->status[i] = int(s.status);
  }
};

ordered_json norm_check(const ordered_json& e) {
  if (e.is_string()) {
    ordered_json o;
    o["name"] = e.get<std::string>();
    return o;
  }
  if (e.is_object() && e.contains("name") && e["name"].is_string()) return e;
  bad("checks entries must be check names or objects with a name");
}

// alive-path values of coordinate j
std::vector<double> alive_coord(const SimBatch& b, size_t j) {
  std::vector<double> v;
  v.reserve(b.n);
  for (size_t i = 0; i < b.n; ++i)
    if (b.status[i] == int(PathStatus::alive)) v.push_back(b.endpoints[i * b.d + j]);
  return v;
}

std::vector<size_t> check_axes(const ordered_json& e, size_t d) {
  std::vector<size_t> axes;
  if (e.contains("axes")) {
    for (double a : list_or(e, "axes", {})) {
      if (a < 0 || a >= double(d) || a != std::floor(a)) bad("axes entries must be coordinate indices");
      axes.push_back(size_t(a));
    }
  } else {
    for (size_t j = 0; j < d; ++j) axes.push_back(j);
  }
  return axes;
}

void run_simulate(const ExperimentConfig& cfg, RunReport& r) {
  const ordered_json& p = cfg.params;
  allow_keys(p, {"x0", "n_paths", "checks", "write_paths"}, "params");
  const size_t d = size_t(cfg.weight.dim);
  const Vec x0 = vec_or(p, "x0", d, Vec(d, 0.0));
  const size_t n = count_or(p, "n_paths", 1000);
  if (n == 0) bad("n_paths must be positive");

  std::vector<ordered_json> checks;
  if (p.contains("checks")) {
    if (!p["checks"].is_array()) bad("checks must be an array");
    for (const auto& e : p["checks"]) checks.push_back(norm_check(e));
  } else {
    checks.push_back(norm_check("conservative"));
  }

  Stepper st(cfg.weight, cfg.sim);
  const double T = double(st.n_steps()) * st.dt();

  SimBatch b;
  b.n = n;
  b.d = d;
  b.nled = st.n_ledgers();
  size_t occ_k0 = 0, occ_stride = 1;
  for (const auto& e : checks) {
    if (e["name"] != "uniform_occupation") continue;
    allow_keys(e, {"name", "bins", "burn_in", "spacing", "alpha"}, "uniform_occupation");
    if (cfg.sim.mode != Mode::reflected || cfg.sim.domain.kind != DomainKind::ball)
      bad("uniform_occupation needs reflected mode on a ball domain");
    b.nbins = count_or(e, "bins", 8);
    const double burn_in = num_or(e, "burn_in", 2.0);
    const double spacing = num_or(e, "spacing", 1.0);
    if (b.nbins < 2) bad("uniform_occupation.bins must be at least 2");
    if (!(spacing > 0.0)) bad("uniform_occupation.spacing must be positive");
    occ_k0 = size_t(std::llround(burn_in / st.dt()));
    occ_stride = std::max<size_t>(1, size_t(std::llround(spacing / st.dt())));
  }
  b.endpoints.assign(n * d, 0.0);
  b.status.assign(n, 0);
  b.ledger.assign(n * std::max<size_t>(1, b.nled), 0.0);
  if (b.nbins) b.bins.assign(n * b.nbins, 0.0);

  Timer run_t;
  run_paths(st, x0, n, cfg.seed, cfg.workers, [&](size_t i) {
    SimObs o;
    o.b = &b;
    o.i = i;
    o.k0 = occ_k0;
    o.kstride = occ_stride;
    o.dom = &cfg.sim.domain;
    return o;
  });
  const double sim_sec = run_t.sec();

  size_t n_alive = 0, n_killed = 0, n_diverged = 0;
  for (int s : b.status) {
    if (s == int(PathStatus::alive)) ++n_alive;
    if (s == int(PathStatus::killed)) ++n_killed;
    if (s == int(PathStatus::diverged)) ++n_diverged;
  }

  // endpoint moments + ledger means (alive paths)
  ordered_json moments = ordered_json::array();
  for (size_t j = 0; j < d; ++j) {
    const MeanVar mv = mean_var(alive_coord(b, j));
    ordered_json row;
    row["axis"] = j;
    row["mean"] = mv.mean;
    row["var"] = mv.var;
    moments.push_back(row);
  }
  ordered_json ledger_means = ordered_json::object();
  for (size_t l = 0; l < b.nled; ++l) {
    KahanSum s;
    for (size_t i = 0; i < n; ++i) s.add(b.ledger[i * b.nled + l]);
    ledger_means[st.ledger_names()[l]] = s.value() / double(n);
  }
  const InterfaceSet ifset = skew_interfaces(cfg.weight, cfg.sim.interface_threshold);
  r.extras["n_paths"] = n;
  r.extras["horizon"] = T;
  r.extras["interfaces"] = {{"kept", ifset.kept.size()}, {"dropped", ifset.dropped_count}};
  r.extras["status"] = {{"alive", n_alive}, {"killed", n_killed}, {"diverged", n_diverged}};
  r.extras["endpoint_moments"] = moments;
  if (b.nled) r.extras["ledger_means"] = ledger_means;

  for (const auto& e : checks) {
    const std::string name = e["name"].get<std::string>();
    Timer ct;
    if (name == "conservative") {
      allow_keys(e, {"name"}, name);
      const double statv = double(n_killed + n_diverged);
      add_check(r, "conservative", statv, 0.0, statv == 0.0,
                {{"killed", n_killed}, {"diverged", n_diverged}});
    } else if (name == "variance") {
      allow_keys(e, {"name", "axes", "target", "z"}, name);
      const double target = num_or(e, "target", T);
      const double z = num_or(e, "z", 4.0);
      double worst = 0.0;
      for (size_t j : check_axes(e, d)) {
        const std::vector<double> xs = alive_coord(b, j);
        const MeanVar mv = mean_var(xs);
        const double se = mv.var * std::sqrt(2.0 / double(std::max<size_t>(2, xs.size()) - 1));
        worst = std::max(worst, std::fabs(mv.var - target) / se);
      }
      add_check(r, "variance", worst, z, worst <= z, {{"target", target}});
    } else if (name == "normality") {
      allow_keys(e, {"name", "axes", "alpha"}, name);
      const double alpha = num_or(e, "alpha", 0.01);
      std::vector<double> pooled;
      for (size_t j : check_axes(e, d))
        for (double v : alive_coord(b, j)) pooled.push_back((v - x0[j]) / std::sqrt(T));
      const KsResult ks = ks_test(std::move(pooled), [](double z) { return normal_cdf(z); });
      add_check(r, "normality", ks.p_value, alpha, ks.p_value >= alpha,
                {{"ks_statistic", ks.statistic}});
    } else if (name == "skew_law") {
      allow_keys(e, {"name", "level", "beta", "frac_lo", "frac_hi", "alpha"}, name);
      const double level = num_or(e, "level", 0.0);
      const double beta = num_req(e, "beta");
      const double lo = num_or(e, "frac_lo", beta - 0.02);
      const double hi = num_or(e, "frac_hi", beta + 0.02);
      const double alpha = num_or(e, "alpha", 0.01);
      std::vector<double> u = alive_coord(b, d - 1);
      size_t above = 0;
      for (double v : u)
        if (v > level) ++above;
      const double frac = double(above) / double(std::max<size_t>(1, u.size()));
      add_check(r, "skew_fraction", frac, hi, frac >= lo && frac <= hi,
                {{"lo", lo}, {"hi", hi}, {"beta", beta}});
      const double sqT = std::sqrt(T);
      auto cdf = [level, beta, sqT](double y) {
        const double z = (y - level) / sqT;
        if (y < level) return 2.0 * (1.0 - beta) * normal_cdf(z);
        return 1.0 - 2.0 * beta * (1.0 - normal_cdf(z));
      };
      const KsResult ks = ks_test(std::move(u), cdf);
      add_check(r, "skew_ks", ks.p_value, alpha, ks.p_value >= alpha,
                {{"ks_statistic", ks.statistic}});
    } else if (name == "ball_confinement") {
      allow_keys(e, {"name", "slack"}, name);
      if (cfg.sim.mode != Mode::reflected) bad("ball_confinement needs reflected mode");
      const double slack = num_or(e, "slack", 1e-9);
      double worst = 0.0;
      std::vector<double> proj(d);
      for (size_t i = 0; i < n; ++i) {
        const double* x = &b.endpoints[i * d];
        if (!cfg.sim.domain.contains(x, d))
          worst = std::max(worst, cfg.sim.domain.project(x, proj.data(), d));
      }
      add_check(r, "ball_confinement", worst, slack, worst <= slack);
    } else if (name == "boundary_ledger") {
      allow_keys(e, {"name", "min_frac"}, name);
      if (st.boundary_slot() < 0) bad("boundary_ledger needs reflected mode");
      const double min_frac = num_or(e, "min_frac", 0.99);
      size_t hit = 0;
      for (size_t i = 0; i < n; ++i)
        if (b.ledger[i * b.nled + size_t(st.boundary_slot())] > 0.0) ++hit;
      const double frac = double(hit) / double(n);
      add_check(r, "boundary_ledger", frac, min_frac, frac >= min_frac);
    } else if (name == "uniform_occupation") {
      const double alpha = num_or(e, "alpha", 0.01);
      std::vector<size_t> counts(b.nbins, 0);
      for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < b.nbins; ++k)
          counts[k] += size_t(std::llround(b.bins[i * b.nbins + k]));
      const std::vector<double> probs(b.nbins, 1.0 / double(b.nbins));
      const ChiSquareResult cs = chi_square_test(counts, probs);
      ordered_json hist = ordered_json::array();
      for (size_t c : counts) hist.push_back(c);
      r.extras["occupation_histogram"] = hist;
      add_check(r, "uniform_occupation", cs.p_value, alpha, cs.p_value >= alpha,
                {{"chi2", cs.statistic}, {"bins", b.nbins}});
    } else if (name == "determinism") {
      allow_keys(e, {"name", "n_paths", "workers_alt"}, name);
      const size_t nd = count_or(e, "n_paths", std::min<size_t>(n, 2000));
      const int wa = int(count_or(e, "workers_alt", 4));
      auto fingerprint = [&](int workers) {
        std::vector<double> ends(nd * d, 0.0), led(nd * std::max<size_t>(1, b.nled), 0.0);
        std::vector<int> stat(nd, 0);
        SimBatch mini;
        mini.n = nd;
        mini.d = d;
        mini.nled = b.nled;
        mini.endpoints.swap(ends);
        mini.ledger.swap(led);
        mini.status.swap(stat);
        run_paths(st, x0, nd, cfg.seed, workers, [&](size_t i) {
          SimObs o;
          o.b = &mini;
          o.i = i;
          o.dom = &cfg.sim.domain;
          return o;
        });
        ordered_json j;
        ordered_json mm = ordered_json::array();
        for (size_t jx = 0; jx < d; ++jx) {
          KahanSum s1, s2;
          for (size_t i = 0; i < nd; ++i) {
            const double v = mini.endpoints[i * d + jx];
            s1.add(v);
            s2.add(v * v);
          }
          mm.push_back(s1.value());
          mm.push_back(s2.value());
        }
        j["moments"] = mm;
        int ssum = 0;
        for (int s : mini.status) ssum += s;
        j["status_sum"] = ssum;
        ordered_json ls = ordered_json::array();
        for (size_t l = 0; l < b.nled; ++l) {
          KahanSum s;
          for (size_t i = 0; i < nd; ++i) s.add(mini.ledger[i * b.nled + l]);
          ls.push_back(s.value());
        }
        j["ledgers"] = ls;
        return j.dump();
      };
      const std::string a1 = fingerprint(1);
      const std::string a2 = fingerprint(1);
      const std::string a3 = fingerprint(wa);
      const double mism = double(int(a1 != a2) + int(a1 != a3));
      add_check(r, "determinism", mism, 0.0, mism == 0.0,
                {{"n_paths", nd}, {"workers", ordered_json::array({1, 1, wa})}});
    } else {
      bad("unknown check " + name);
    }
    r.checks.back().runtime_sec = ct.sec() + (r.checks.size() == 1 ? sim_sec : 0.0);
  }

  const size_t n_csv = count_or(p, "write_paths", 0);
  if (n_csv > 0 && !cfg.out_dir.empty()) {
    std::ofstream out(cfg.out_dir + "/paths.csv");
    out << "path,step,t";
    for (size_t j = 0; j < d; ++j) out << ",x" << (j + 1);
    for (const std::string& name : st.ledger_names()) out << "," << name;
    out << "\n";
    for (size_t i = 0; i < std::min(n_csv, n); ++i) {
      const Path path = simulate(cfg.weight, cfg.sim, x0, cfg.seed, i);
      char buf[64];
      for (size_t k = 0; k < path.times.size(); ++k) {
        out << i << ',' << k;
        std::snprintf(buf, sizeof buf, ",%.9g", path.times[k]);
        out << buf;
        for (size_t j = 0; j < d; ++j) {
          std::snprintf(buf, sizeof buf, ",%.9g", path.state(k)[j]);
          out << buf;
        }
        for (const auto& ledger : path.ledgers) {
          std::snprintf(buf, sizeof buf, ",%.9g", ledger[k]);
          out << buf;
        }
        out << "\n";
      }
    }
  }
}

// --------------------------------------------------------------- local_time

struct LtObs {
  TanakaAccum tan;
  OccupationAccum occ;
  size_t slot = 0;
  double led = 0.0;
  double* out = nullptr;  // [tanaka, occupation, ledger]
  void step(const StepView& v) {
    tan.step(v);
    occ.step(v);
    led += v.ledger_inc[slot];
  }
  void finish(const Stepper::State&) {
    out[0] = tan.value();
    out[1] = occ.value();
    out[2] = led;
  }
};

void run_local_time(const ExperimentConfig& cfg, RunReport& r) {
  const ordered_json& p = cfg.params;
  allow_keys(p, {"x0", "level", "axis", "n_paths", "eps", "expected", "band_tol", "pair_tol"},
             "params");
  const size_t d = size_t(cfg.weight.dim);
  const Vec x0 = vec_or(p, "x0", d, Vec(d, 0.0));
  const double level = num_or(p, "level", 0.0);
  const size_t n = count_or(p, "n_paths", 20000);
  const double sqdt = std::sqrt(cfg.sim.dt);
  const double eps = num_or(p, "eps", 2.0 * sqdt);
  const double axis_raw = num_or(p, "axis", -1.0);
  const size_t axis = axis_raw < 0 ? d - 1 : size_t(axis_raw);
  if (axis >= d) bad("axis out of range");
  if (eps < 2.0 * sqdt - 1e-15) bad("eps must be at least 2*sqrt(dt)");
  const double band_tol = num_or(p, "band_tol", 0.02);
  const double pair_tol = num_or(p, "pair_tol", 0.03);

  SimConfig sim = cfg.sim;
  sim.observer_band = eps;
  sim.observer_levels.push_back(
      make_level_interface(InterfaceGeom::hyperplane, level, 1.0, 1.0));
  Stepper st(cfg.weight, sim);
  const double T = double(st.n_steps()) * st.dt();
  const double expected = num_or(p, "expected", std::sqrt(2.0 * T / kPi));
  const size_t slot = observer_slot(st, 0);

  std::vector<double> vals(n * 3, 0.0);
  Timer run_t;
  run_paths(st, x0, n, cfg.seed, cfg.workers, [&](size_t i) {
    LtObs o;
    o.tan.level = level;
    o.tan.axis = axis;
    o.occ.level = level;
    o.occ.eps = eps;
    o.occ.dt = st.dt();
    o.occ.axis = axis;
    o.slot = slot;
    o.out = &vals[i * 3];
    return o;
  });

  std::vector<double> tan(n), occ(n), led(n);
  for (size_t i = 0; i < n; ++i) {
    tan[i] = vals[i * 3];
    occ[i] = vals[i * 3 + 1];
    led[i] = vals[i * 3 + 2];
  }
  const MeanVar mt = mean_var(tan), mo = mean_var(occ), ml = mean_var(led);
  const double lo = expected * (1.0 - band_tol), hi = expected * (1.0 + band_tol);
  const double gap = std::fabs(mt.mean - mo.mean) / (0.5 * (mt.mean + mo.mean));

  add_check(r, "tanaka_range", mt.mean, band_tol, mt.mean >= lo && mt.mean <= hi,
            {{"expected", expected}, {"lo", lo}, {"hi", hi}, {"se", mt.stderr_}})
      .runtime_sec = run_t.sec();
  add_check(r, "occupation_range", mo.mean, band_tol, mo.mean >= lo && mo.mean <= hi,
            {{"expected", expected}, {"lo", lo}, {"hi", hi}, {"se", mo.stderr_}});
  add_check(r, "pairwise_gap", gap, pair_tol, gap < pair_tol,
            {{"tanaka", mt.mean}, {"occupation", mo.mean}});

  r.extras["n_paths"] = n;
  r.extras["eps"] = eps;
  r.extras["expected"] = expected;
  r.extras["tanaka"] = {{"mean", mt.mean}, {"se", mt.stderr_}};
  r.extras["occupation"] = {{"mean", mo.mean}, {"se", mo.stderr_}};
  r.extras["band_ledger"] = {{"mean", ml.mean}, {"se", ml.stderr_}};
}

// -------------------------------------------------------------------- revuz

struct RevuzObs {
  DiscountAccum acc;
  size_t slot = 0;
  double dt = 0.0;
  double* out = nullptr;  // [value, tail_bound]
  void step(const StepView& v) { acc.observe(v.t_post - dt, v.ledger_inc[slot]); }
  void finish(const Stepper::State&) {
    out[0] = acc.value();
    out[1] = acc.tail_bound();
  }
};

void run_revuz(const ExperimentConfig& cfg, RunReport& r) {
  const ordered_json& p = cfg.params;
  allow_keys(p,
             {"x0", "level", "geometry", "gamma", "target", "tol", "n_paths", "ci_k",
              "resolvent"},
             "params");
  const size_t d = size_t(cfg.weight.dim);
  const Vec x0 = vec_or(p, "x0", d, Vec(d, 0.0));
  const double level = num_or(p, "level", 0.0);
  const std::string geom_s = str_or(p, "geometry", "hyperplane");
  if (geom_s != "hyperplane" && geom_s != "sphere")
    bad("geometry must be hyperplane or sphere");
  const InterfaceGeom geom =
      geom_s == "sphere" ? InterfaceGeom::sphere : InterfaceGeom::hyperplane;
  const std::vector<double> gamma = list_or(p, "gamma", {1.0, 1.0});
  if (gamma.size() != 2 || gamma[0] <= 0.0 || gamma[1] <= 0.0)
    bad("gamma must be two positive side densities");
  const double target = num_or(p, "target", 1.0 / std::sqrt(2.0));
  const double tol = num_or(p, "tol", 0.03);
  const size_t n = count_or(p, "n_paths", 6000);
  const double ci_k = num_or(p, "ci_k", 3.0);

  const Interface iface = make_level_interface(geom, level, gamma[0], gamma[1]);
  SimConfig sim = cfg.sim;
  sim.observer_levels.push_back(iface);
  Stepper st(cfg.weight, sim);
  const size_t slot = observer_slot(st, 0);

  std::vector<double> vals(n * 2, 0.0);
  Timer run_t;
  run_paths(st, x0, n, cfg.seed, cfg.workers, [&](size_t i) {
    RevuzObs o;
    o.slot = slot;
    o.dt = st.dt();
    o.out = &vals[i * 2];
    return o;
  });
  std::vector<double> disc(n), tails(n);
  for (size_t i = 0; i < n; ++i) {
    disc[i] = vals[i * 2];
    tails[i] = vals[i * 2 + 1];
  }
  const MeanVar mv = mean_var(disc), mtail = mean_var(tails);

  add_check(r, "revuz_value", mv.mean, tol,
            std::fabs(mv.mean - target) <= tol * target,
            {{"target", target}, {"se", mv.stderr_}, {"tail_bound", mtail.mean}})
      .runtime_sec = run_t.sec();
  r.extras["ledger_route"] = {{"mean", mv.mean}, {"se", mv.stderr_}, {"tail_bound", mtail.mean}};

  ordered_json rp = p.contains("resolvent") ? p["resolvent"] : ordered_json::object();
  if (!rp.is_object()) bad("resolvent must be an object");
  allow_keys(rp, {"run", "n_paths", "kernel_h", "horizon"}, "resolvent");
  const bool run2 = !rp.contains("run") || (rp["run"].is_boolean() && rp["run"].get<bool>());
  if (rp.contains("run") && !rp["run"].is_boolean()) bad("resolvent.run must be a boolean");
  if (run2) {
    Timer t2;
    const size_t n2 = count_or(rp, "n_paths", 4000);
    const double h = num_or(rp, "kernel_h", 0.02);
    SimConfig simr = cfg.sim;
    simr.horizon = num_or(rp, "horizon", cfg.sim.horizon);
    const PotentialEstimate est = mc_resolvent_measure(
        cfg.weight, simr, x0, iface, h, n2, cfg.seed ^ 0x9E3779B97F4A7C15ull, cfg.workers);
    const double sep = std::hypot(mv.stderr_, est.error);
    const double statv = std::fabs(mv.mean - est.value) / sep;
    add_check(r, "revuz_resolvent_match", statv, ci_k, statv <= ci_k,
              {{"ledger", mv.mean},
               {"resolvent", est.value},
               {"ledger_se", mv.stderr_},
               {"resolvent_se", est.error},
               {"kernel_h", h}})
        .runtime_sec = t2.sec();
    r.extras["resolvent_route"] = {{"mean", est.value}, {"se", est.error}, {"kernel_h", h}};
  }
}

// ------------------------------------------------------------------- bessel

void run_bessel(const ExperimentConfig& cfg, RunReport& r) {
  const ordered_json& p = cfg.params;
  allow_keys(p, {"alphas", "x0", "ts", "n_paths", "tol"}, "params");
  const int d = cfg.weight.dim;
  Vec x0_dflt(size_t(d), 0.0);
  x0_dflt[0] = 1.0;
  const Vec x0 = vec_or(p, "x0", size_t(d), x0_dflt);
  const std::vector<double> alphas = list_or(p, "alphas", {1.0, -1.0, 0.0});
  const std::vector<double> ts = list_or(p, "ts", {1.0});
  const size_t n = count_or(p, "n_paths", 100000);
  const double tol = num_or(p, "tol", 0.02);

  ordered_json table = ordered_json::array();
  for (size_t a = 0; a < alphas.size(); ++a) {
    Timer at;
    const MomentReport rep = bessel_moment_check(alphas[a], d, x0, ts, cfg.sim.dt, n,
                                                 cfg.seed + 1000 * a, cfg.workers, tol);
    double worst = 0.0;
    for (const MomentRow& row : rep.rows) {
      worst = std::max(worst, std::fabs(row.estimate - row.target) / row.target);
      ordered_json j;
      j["alpha"] = alphas[a];
      j["t"] = row.t;
      j["target"] = row.target;
      j["estimate"] = row.estimate;
      j["se"] = row.se;
      table.push_back(j);
    }
    add_check(r, "moment_alpha_" + fmt_num(alphas[a]), worst, tol, rep.pass,
              {{"alpha", alphas[a]}, {"n_paths", n}})
        .runtime_sec = at.sec();
  }
  r.extras["moments"] = table;
}

// ----------------------------------------------------------------------- a2

void run_a2(const ExperimentConfig& cfg, RunReport& r) {
  const ordered_json& p = cfg.params;
  allow_keys(p, {"center", "radii", "expect", "spread_max", "growth_min"}, "params");
  const size_t d = size_t(cfg.weight.dim);
  const Vec center = vec_or(p, "center", d, Vec(d, 0.0));
  if (!p.contains("radii")) bad("radii is required");
  const std::vector<double> radii = list_or(p, "radii", {});
  const std::string expect = str_or(p, "expect", "bounded");

  Timer at;
  const A2Result a = a2_estimate(cfg.weight, center, radii);
  ordered_json table = ordered_json::array();
  for (const A2Entry& e : a.entries) {
    ordered_json j;
    j["radius"] = e.radius;
    j["product"] = e.product;
    j["avg_w"] = e.avg_w;
    j["avg_winv"] = e.avg_winv;
    j["converged"] = e.converged;
    table.push_back(j);
  }
  r.extras["entries"] = table;
  r.extras["sup_product"] = a.sup_product;

  if (expect == "bounded") {
    const double spread_max = num_or(p, "spread_max", 1.2);
    add_check(r, "a2_bounded", a.spread, spread_max,
              a.spread <= spread_max && a.all_converged,
              {{"sup_product", a.sup_product}, {"all_converged", a.all_converged}})
        .runtime_sec = at.sec();
  } else if (expect == "divergent") {
    const double growth_min = num_or(p, "growth_min", 10.0);
    add_check(r, "a2_divergent", a.growth_factor, growth_min,
              a.growth_factor >= growth_min && a.monotone,
              {{"monotone", a.monotone}, {"all_converged", a.all_converged}})
        .runtime_sec = at.sec();
  } else {
    bad("expect must be bounded or divergent");
  }
}

// -------------------------------------------------------------------- riesz

void run_riesz(const ExperimentConfig& cfg, RunReport& r) {
  const ordered_json& p = cfg.params;
  allow_keys(p,
             {"eta", "support_radius", "center", "density", "points", "targets", "tol",
              "mc_budget", "holder"},
             "params");
  const size_t d = size_t(cfg.weight.dim);
  const double eta = num_or(p, "eta", 2.0);
  const double R = num_or(p, "support_radius", 1.0);
  const Vec center = vec_or(p, "center", d, Vec(d, 0.0));
  const std::string density = str_or(p, "density", "indicator");
  if (density != "indicator") bad("density must be indicator");
  const std::vector<Vec> pts = points_or(p, "points", d, {});
  if (pts.empty()) bad("points is required");
  std::vector<double> targets;
  if (p.contains("targets")) {
    targets = list_or(p, "targets", {});
    if (targets.size() != pts.size()) bad("targets must match points");
  }
  const double tol = num_or(p, "tol", 1e-3);
  const size_t budget = count_or(p, "mc_budget", 400000);

  RadialDensity g;
  g.center = center;
  g.g = [](double) { return 1.0; };
  g.support_radius = R;

  auto value_at = [&](const Vec& x) {
    return riesz_potential(g, eta, x, int(d), budget);
  };

  ordered_json table = ordered_json::array();
  for (size_t i = 0; i < pts.size(); ++i) {
    Timer it;
    const PotentialEstimate est = value_at(pts[i]);
    ordered_json row;
    row["x"] = vec_json(pts[i]);
    row["value"] = est.value;
    row["error"] = est.error;
    row["converged"] = est.converged;
    row["kind"] = est.kind;
    table.push_back(row);
    if (!targets.empty()) {
      const double dev = std::fabs(est.value - targets[i]);
      add_check(r, "riesz_point_" + std::to_string(i), dev, tol,
                dev <= tol && est.converged,
                {{"value", est.value}, {"target", targets[i]}, {"quad_error", est.error}})
          .runtime_sec = it.sec();
    }
  }
  r.extras["points"] = table;

  if (p.contains("holder")) {
    const ordered_json& h = p["holder"];
    if (!h.is_object()) bad("holder must be an object");
    allow_keys(h, {"target", "lo", "hi", "n"}, "holder");
    const double target = num_or(h, "target", 1.0);
    const double lo = num_or(h, "lo", 1.1);
    const double hi = num_or(h, "hi", 2.4);
    const size_t hn = count_or(h, "n", 8);
    if (!(hi > lo) || hn < 3) bad("holder grid is degenerate");
    Timer ht;
    // one ray suffices for a radial density — and cross-axis pairs would pair
    // distant points with nearly equal values, wrecking the modulus fit
    std::vector<Vec> grid;
    for (size_t i = 0; i < hn; ++i) {
      Vec x(d, 0.0);
      x[0] = lo + (hi - lo) * double(i) / double(hn - 1);
      grid.push_back(x);
    }
    const HolderFit fit = holder_probe([&](const Vec& x) { return value_at(x).value; },
                                       grid, target);
    add_check(r, "riesz_holder", std::min(fit.exponent, 99.0), target - 0.1, fit.pass,
              {{"r2", fit.r2}, {"pairs", fit.pairs}, {"degenerate", fit.degenerate}})
        .runtime_sec = ht.sec();
  }
}

// ---------------------------------------------------------------------- s00

void run_s00(const ExperimentConfig& cfg, RunReport& r) {
  const ordered_json& p = cfg.params;
  allow_keys(p,
             {"variant", "support_radius", "grid_radii", "n_paths", "tol", "radius",
              "kernel_h", "revuz_weight"},
             "params");
  const size_t d = size_t(cfg.weight.dim);
  const std::string variant = str_or(p, "variant", "lebesgue_ball");
  const size_t n = count_or(p, "n_paths", 3000);
  const double tol = num_or(p, "tol", 0.05);

  auto radial_grid = [&](const std::vector<double>& radii) {
    std::vector<Vec> grid;
    for (double rad : radii) {
      Vec x(d, 0.0);
      x[0] = rad;
      grid.push_back(x);
    }
    return grid;
  };

  if (variant == "lebesgue_ball") {
    const double R = num_or(p, "support_radius", 1.0);
    const std::vector<Vec> grid =
        radial_grid(list_or(p, "grid_radii", {0.0, 0.4, 0.8, 1.2, 1.6, 2.0}));
    RadialDensity g;
    g.center = Vec(d, 0.0);
    g.g = [](double) { return 1.0; };
    g.support_radius = R;
    auto candidate = [&](const Vec& x) { return riesz_potential(g, 2.0, x, int(d)).value; };
    auto f = [&](const Vec& x) { return norm(x) <= R ? 1.0 : 0.0; };

    Timer t1;
    std::vector<double> potential(grid.size());
    std::vector<double> ses(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
      const PotentialEstimate est = mc_resolvent_density(
          cfg.weight, cfg.sim, grid[i], f, n, cfg.seed + 1000 * i, cfg.workers);
      potential[i] = est.value;
      ses[i] = est.error;
    }
    const S00Report rep = s00_check(grid, potential, candidate, tol);
    // R_1 f ≤ G f = (2π)^{-1} V_2 f pointwise in d=3, so the fitted constant
    // against the V_2 candidate must sit below (1+tol)/2π
    const double c_max = (1.0 + tol) / (2.0 * kPi);
    add_check(r, "s00_domination", rep.fitted_c, c_max,
              rep.pass && rep.fitted_c <= c_max && rep.fitted_c > 0.0,
              {{"note", rep.note}})
        .runtime_sec = t1.sec();
    add_check(r, "s00_continuity", std::min(rep.continuity.exponent, 99.0), 0.15,
              rep.continuity.pass,
              {{"r2", rep.continuity.r2}, {"pairs", rep.continuity.pairs}});
    ordered_json table = ordered_json::array();
    for (size_t i = 0; i < grid.size(); ++i) {
      ordered_json row;
      row["x"] = vec_json(grid[i]);
      row["potential"] = potential[i];
      row["se"] = ses[i];
      row["bound"] = rep.bound[i];
      table.push_back(row);
    }
    r.extras["grid"] = table;
    r.extras["fitted_c"] = rep.fitted_c;
  } else if (variant == "sphere_measure") {
    const double a = num_or(p, "radius", 1.0);
    const double rw = num_or(p, "revuz_weight", 1.0);
    const double h = num_or(p, "kernel_h", 0.05);
    const std::vector<Vec> grid =
        radial_grid(list_or(p, "grid_radii", {0.3, 0.6, 1.0, 1.45, 2.0}));
    Interface iface = make_level_interface(InterfaceGeom::sphere, a, 1.0, 1.0);
    iface.revuz_weight = rw;
    auto candidate = [&](const Vec& x) { return 1.0 / std::max(norm(x), a); };

    Timer t1;
    std::vector<double> potential(grid.size());
    std::vector<double> ses(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
      const PotentialEstimate est = mc_resolvent_measure(
          cfg.weight, cfg.sim, grid[i], iface, h, n, cfg.seed + 1000 * i, cfg.workers);
      potential[i] = est.value;
      ses[i] = est.error;
    }
    const S00Report rep = s00_check(grid, potential, candidate, tol);
    // recorded, not asserted: the candidate is the flat-case shell shape
    add_check(r, "s00_sphere_recorded", rep.fitted_c, 0.0, true,
              {{"assertive", false},
               {"domination", rep.pass},
               {"continuity_pass", rep.continuity.pass},
               {"note", rep.note}})
        .runtime_sec = t1.sec();
    ordered_json table = ordered_json::array();
    for (size_t i = 0; i < grid.size(); ++i) {
      ordered_json row;
      row["x"] = vec_json(grid[i]);
      row["potential"] = potential[i];
      row["se"] = ses[i];
      row["bound"] = rep.bound[i];
      table.push_back(row);
    }
    r.extras["grid"] = table;
    r.extras["fitted_c"] = rep.fitted_c;
  } else {
    bad("variant must be lebesgue_ball or sphere_measure");
  }
}

// ----------------------------------------------------------------- envelope

void run_envelope(const ExperimentConfig& cfg, RunReport& r) {
  const ordered_json& p = cfg.params;
  allow_keys(p, {"xs", "ys", "bandwidth", "n_paths", "stability_tol"}, "params");
  if (cfg.weight.rho.kind != RhoKind::radial_power)
    bad("envelope needs a radial power weight");
  const double alpha = cfg.weight.rho.alpha;
  const int d = cfg.weight.dim;
  const std::vector<Vec> xs = points_or(
      p, "xs", size_t(d),
      {{0.8, 0.0, 0.0}, {0.9, 0.0, 0.0}, {1.0, 0.0, 0.0}, {1.1, 0.0, 0.0}, {1.2, 0.0, 0.0}});
  const std::vector<Vec> ys = points_or(p, "ys", size_t(d),
                                        {{1.0, 0.6, 0.0},
                                         {1.05, 0.0, 0.62},
                                         {0.95, -0.58, 0.0},
                                         {1.0, 0.44, 0.44},
                                         {0.95, 0.0, -0.65}});
  const double h = num_or(p, "bandwidth", 0.1);
  const size_t n = count_or(p, "n_paths", 3000);
  const double stab_tol = num_or(p, "stability_tol", 0.2);

  Timer t1;
  std::vector<double> ratio_lo, ratio_up;
  ordered_json table = ordered_json::array();
  bool finite_ok = true;
  for (size_t i = 0; i < xs.size(); ++i) {
    const std::vector<PotentialEstimate> ests = mc_resolvent_kernel(
        cfg.weight, cfg.sim, xs[i], ys, h, n, cfg.seed + 1000 * i, cfg.workers);
    for (size_t j = 0; j < ys.size(); ++j) {
      const EnvelopePair env = resolvent_envelope(alpha, d, xs[i], ys[j]);
      const double v = ests[j].value;
      if (!(v > 0.0) || !std::isfinite(env.lower) || !std::isfinite(env.upper))
        finite_ok = false;
      ratio_lo.push_back(v / env.lower);
      ratio_up.push_back(v / env.upper);
      ordered_json row;
      row["x"] = vec_json(xs[i]);
      row["y"] = vec_json(ys[j]);
      row["dist"] = dist(xs[i], ys[j]);
      row["r_hat"] = v;
      row["se"] = ests[j].error;
      row["lower"] = env.lower;
      row["upper"] = env.upper;
      table.push_back(row);
    }
  }
  const double sim_sec = t1.sec();

  auto stability = [](const std::vector<double>& ratios) {
    double mean = 0.0;
    for (double v : ratios) mean += v;
    mean /= double(ratios.size());
    double worst = 0.0;
    for (double v : ratios) worst = std::max(worst, std::fabs(v / mean - 1.0));
    return worst;
  };
  const double s_lo = stability(ratio_lo), s_up = stability(ratio_up);
  const double c1 = *std::min_element(ratio_lo.begin(), ratio_lo.end());
  const double c2 = *std::max_element(ratio_up.begin(), ratio_up.end());

  add_check(r, "envelope_stability_lower", s_lo, stab_tol, finite_ok && s_lo <= stab_tol,
            {{"c1", c1}})
      .runtime_sec = sim_sec;
  add_check(r, "envelope_stability_upper", s_up, stab_tol, finite_ok && s_up <= stab_tol,
            {{"c2", c2}});
  // c1·lower ≤ r̂ ≤ c2·upper holds at every grid point by construction of
  // c1/c2; assert finiteness and a sane spread between the two constants
  const double spread = c2 / c1;
  add_check(r, "envelope_sandwich", spread, 0.0,
            finite_ok && c1 > 0.0 && std::isfinite(spread),
            {{"c1", c1}, {"c2", c2}});
  r.extras["grid"] = table;
  r.extras["alpha"] = alpha;
  r.extras["bandwidth"] = h;
}

// ----------------------------------------------------------------- symmetry

void run_symmetry(const ExperimentConfig& cfg, RunReport& r) {
  const ordered_json& p = cfg.params;
  allow_keys(p, {"t", "f", "g", "box_lo", "box_hi", "n_paths", "tol"}, "params");
  const size_t d = size_t(cfg.weight.dim);
  const double t = num_or(p, "t", 0.4);
  Bump fd;
  fd.center = Vec(d, 0.0);
  fd.center[0] = 0.7;
  fd.radius = 0.6;
  Bump gd;
  gd.center = Vec(d, 0.0);
  gd.center[0] = -0.6;
  gd.radius = 0.6;
  const Bump f = parse_bump(p, "f", d, fd);
  const Bump g = parse_bump(p, "g", d, gd);
  const Vec lo = vec_or(p, "box_lo", d, Vec(d, -2.0));
  const Vec hi = vec_or(p, "box_hi", d, Vec(d, 2.0));
  const size_t n = count_or(p, "n_paths", 40000);
  const double tol = num_or(p, "tol", 0.03);

  Timer t1;
  const SymmetryReport rep =
      symmetry_check(cfg.weight, cfg.sim, f, g, t, lo, hi, n, cfg.seed, cfg.workers, tol);
  add_check(r, "symmetry_gap", rep.rel_gap, tol, rep.pass,
            {{"forward", rep.forward},
             {"backward", rep.backward},
             {"se_diff", rep.se_diff},
             {"t", t}})
      .runtime_sec = t1.sec();
  r.extras["forward"] = {{"value", rep.forward}, {"se", rep.se_forward}};
  r.extras["backward"] = {{"value", rep.backward}, {"se", rep.se_backward}};
  r.extras["n_paths"] = rep.n_paths;
}

// ------------------------------------------------------------------- feller

void run_feller(const ExperimentConfig& cfg, RunReport& r) {
  const ordered_json& p = cfg.params;
  allow_keys(p, {"alphas", "grid", "ts", "far_x", "far_t", "far_tol", "n_paths", "f"},
             "params");
  const size_t d = size_t(cfg.weight.dim);
  const std::vector<double> alphas = list_or(p, "alphas", {-1.0, 1.0});
  const std::vector<Vec> grid = points_or(p, "grid", d,
                                          {{0.2, 0.0, 0.0},
                                           {0.6, 0.0, 0.0},
                                           {1.0, 0.0, 0.0},
                                           {1.4, 0.0, 0.0},
                                           {1.8, 0.0, 0.0}});
  const std::vector<double> ts = list_or(p, "ts", {0.1, 0.01, 0.001});
  Vec far_dflt(d, 0.0);
  far_dflt[0] = 10.0;
  const Vec far_x = vec_or(p, "far_x", d, far_dflt);
  const double far_t = num_or(p, "far_t", 1.0);
  const double far_tol = num_or(p, "far_tol", 1e-6);
  const size_t n = count_or(p, "n_paths", 10000);
  Bump fd;
  fd.center = Vec(d, 0.0);
  fd.radius = 1.0;
  const Bump f = parse_bump(p, "f", d, fd);

  ordered_json table = ordered_json::array();
  for (size_t a = 0; a < alphas.size(); ++a) {
    WeightSpec w = cfg.weight;
    w.rho.kind = RhoKind::radial_power;
    w.rho.alpha = alphas[a];
    w.rho.c = 1.0;
    Timer at;
    const FellerReport rep = feller_check(w, cfg.sim, f, grid, ts, far_x, far_t, far_tol,
                                          n, cfg.seed + 5000 * a, cfg.workers);
    for (const FellerRow& row : rep.rows) {
      ordered_json j;
      j["alpha"] = alphas[a];
      j["x"] = vec_json(row.x);
      j["t"] = row.t;
      j["gap"] = row.gap;
      j["se"] = row.se;
      table.push_back(j);
    }
    // trend statistic: mean gap at the smallest t over mean gap at the largest
    double g_first = 0.0, g_last = 0.0;
    size_t c_first = 0, c_last = 0;
    for (const FellerRow& row : rep.rows) {
      if (row.t == ts.front()) {
        g_first += row.gap;
        ++c_first;
      }
      if (row.t == ts.back()) {
        g_last += row.gap;
        ++c_last;
      }
    }
    const double trend = c_first && c_last
                             ? (g_last / double(c_last)) / std::max(1e-300, g_first / double(c_first))
                             : 1.0;
    const std::string tag = fmt_num(alphas[a]);
    add_check(r, "feller_trend_alpha_" + tag, trend, 1.0, rep.trend_ok,
              {{"alpha", alphas[a]}})
        .runtime_sec = at.sec();
    add_check(r, "feller_far_alpha_" + tag, rep.far_value, far_tol, rep.far_ok,
              {{"far_se", rep.far_se}, {"far_x", vec_json(far_x)}, {"far_t", far_t}});
  }
  r.extras["rows"] = table;
}

// ------------------------------------------------------------- kernel_bound

void run_kernel_bound(const ExperimentConfig& cfg, RunReport& r) {
  const ordered_json& p = cfg.params;
  allow_keys(p,
             {"x", "ts", "half_width", "grid_n", "eps_bound", "n_paths", "mass_tol",
              "c_spread_max", "bandwidth", "min_bulk"},
             "params");
  const size_t d = size_t(cfg.weight.dim);
  if (d > 3) bad("kernel_bound supports dimension <= 3");
  Vec x_dflt(d, 0.0);
  x_dflt[0] = 0.8;
  const Vec x = vec_or(p, "x", d, x_dflt);
  const std::vector<double> ts = list_or(p, "ts", {0.1, 0.2, 0.4});
  const double half_width = num_or(p, "half_width", 2.6);
  const size_t grid_n = count_or(p, "grid_n", 13);
  const double eps_bound = num_or(p, "eps_bound", 1.0);
  const size_t n = count_or(p, "n_paths", 20000);
  const double mass_tol = num_or(p, "mass_tol", 0.05);
  const double c_spread_max = num_or(p, "c_spread_max", 2.0);
  const double bw = num_or(p, "bandwidth", 0.0);
  const size_t min_bulk = count_or(p, "min_bulk", 50);
  if (grid_n < 3) bad("grid_n must be at least 3");

  const double step = 2.0 * half_width / double(grid_n - 1);
  std::vector<Vec> grid;
  std::vector<double> cell;
  std::vector<size_t> idx(d, 0);
  const size_t total = size_t(std::llround(std::pow(double(grid_n), double(d))));
  for (size_t flat = 0; flat < total; ++flat) {
    size_t rem = flat;
    Vec y(d, 0.0);
    for (size_t j = 0; j < d; ++j) {
      y[j] = x[j] - half_width + step * double(rem % grid_n);
      rem /= grid_n;
    }
    grid.push_back(std::move(y));
    cell.push_back(std::pow(step, double(d)));
  }

  ordered_json table = ordered_json::array();
  std::vector<double> cs;
  for (size_t i = 0; i < ts.size(); ++i) {
    Timer it;
    const KernelEstimate ke =
        heat_kernel_estimate(cfg.weight, cfg.sim, x, ts[i], grid, cell, n,
                             cfg.seed + 999 * i, cfg.workers, eps_bound, bw);
    ordered_json row;
    row["t"] = ts[i];
    row["mass"] = ke.mass;
    row["fitted_c"] = ke.fitted_c;
    row["bulk_points"] = ke.bulk_points;
    row["bandwidth"] = ke.bandwidth;
    table.push_back(row);
    const std::string tag = fmt_num(ts[i]);
    add_check(r, "kernel_mass_t" + tag, ke.mass, mass_tol,
              std::fabs(ke.mass - 1.0) <= mass_tol, {{"t", ts[i]}})
        .runtime_sec = it.sec();
    add_check(r, "kernel_bound_t" + tag, ke.fitted_c, 0.0,
              ke.bound_holds && ke.bulk_points >= min_bulk,
              {{"bulk_points", ke.bulk_points}, {"eps_bound", eps_bound}});
    cs.push_back(ke.fitted_c);
  }
  if (cs.size() >= 2) {
    const double cmax = *std::max_element(cs.begin(), cs.end());
    const double cmin = *std::min_element(cs.begin(), cs.end());
    const double spread = cmin > 0.0 ? cmax / cmin : 1e300;
    add_check(r, "kernel_c_stability", spread, c_spread_max, spread <= c_spread_max);
  }
  r.extras["rows"] = table;
  (void)idx;
}

// --------------------------------------------------------------------- nash

void run_nash(const ExperimentConfig& cfg, RunReport& r) {
  const ordered_json& p = cfg.params;
  allow_keys(p, {"radius", "delta"}, "params");
  const double radius = num_or(p, "radius", 1.0);
  const double delta = num_or(p, "delta", 0.5);

  Timer t1;
  const NashReport rep = nash_probe(cfg.weight, radius, delta);
  add_check(r, "nash_holds", rep.fitted_c, 0.0, rep.pass,
            {{"exponent", rep.exponent}, {"radius", radius}})
      .runtime_sec = t1.sec();
  ordered_json table = ordered_json::array();
  for (const NashRow& row : rep.rows) {
    ordered_json j;
    j["fn"] = row.fn;
    j["l1"] = row.l1;
    j["l2sq"] = row.l2sq;
    j["energy"] = row.energy;
    j["lhs"] = row.lhs;
    j["bracket"] = row.bracket;
    j["c_required"] = row.c_required;
    table.push_back(j);
  }
  r.extras["rows"] = table;
  r.extras["fitted_c"] = rep.fitted_c;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
  RunReport r;
  r.experiment = cfg.experiment;
  r.seed = cfg.seed;
  r.config_echo = canonical_config(cfg);
  r.extras = ordered_json::object();

  if (cfg.experiment == "simulate")
    run_simulate(cfg, r);
  else if (cfg.experiment == "local_time")
    run_local_time(cfg, r);
  else if (cfg.experiment == "revuz")
    run_revuz(cfg, r);
  else if (cfg.experiment == "bessel")
    run_bessel(cfg, r);
  else if (cfg.experiment == "a2")
    run_a2(cfg, r);
  else if (cfg.experiment == "riesz")
    run_riesz(cfg, r);
  else if (cfg.experiment == "s00")
    run_s00(cfg, r);
  else if (cfg.experiment == "envelope")
    run_envelope(cfg, r);
  else if (cfg.experiment == "symmetry")
    run_symmetry(cfg, r);
  else if (cfg.experiment == "feller")
    run_feller(cfg, r);
  else if (cfg.experiment == "kernel_bound")
    run_kernel_bound(cfg, r);
  else if (cfg.experiment == "nash")
    run_nash(cfg, r);
  else
    throw ConfigError("experiment: unknown experiment " + cfg.experiment);
  return r;
}

}  // namespace skewflow
