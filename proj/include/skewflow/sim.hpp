#pragma once
// Tamed Euler-Maruyama engine for the distorted Brownian motion with skew
// crossings and optional killing/reflection.
//
//   proposal   y = x + b̃(x)·dt + √dt·Z,   b̃ = b·min(1, M/‖b‖),  b = ∇ρ/2ρ
//   skew       when the step crosses a level or lands in its band |v−a| ≤ ε,
//              the post-distance is re-signed: v ← a + ξ|v−a|, P(ξ=+1) = β
//              (Harrison–Shepp flip; exact for driftless single-level case)
//   reflect    post outside Ḡ is projected to the nearest boundary point;
//              the projected distance accrues to the boundary ledger
//   kill       ρ(post) ≤ floor ends the path
//
// Interface ledgers record band occupation (dt/2ε per step whose pre-state
// lies in the band) — the discrete analogue of the symmetric local time,
// whose Revuz measure is ½(γ_lo+γ_hi)·ρσ on the level set.
//
// Per-path RNG streams are keyed by path index, so batch results do not
// depend on the worker count; reductions run in path order.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "skewflow/rng.hpp"
#include "skewflow/vec.hpp"
#include "skewflow/weights.hpp"

namespace skewflow {

enum class PathStatus { alive, killed, diverged };

struct SimConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  double drift_cap = 1e3;           // taming threshold M
  double skew_band = 0.0;           // ε for skew interfaces; 0 → √dt
  double observer_band = 0.0;       // ε for measure-only levels; 0 → 2√dt
  double kill_floor_scale = 1e-12;  // ρ floor = scale·max(1, ρ(x0))
  double interface_threshold = 1e-3;
  Mode mode = Mode::free_motion;
  Domain domain;                    // reflected mode
  // measure-only levels (no dynamics): band-occupation ledgers for local-time
  // and Revuz estimation on top of whatever φ prescribes
  std::vector<Interface> observer_levels;
};

struct StepOutcome {
  bool skewed = false;
  bool reflected = false;
  bool killed = false;
  bool diverged = false;
  int iface = -1;  // ledger slot of the skew event
};

struct StepView {
  size_t k = 0;        // step index; post time = (k+1)·dt
  double t_post = 0.0;
  const double* pre = nullptr;
  const double* post = nullptr;
  size_t dim = 0;
  StepOutcome outcome;
  const double* ledger_inc = nullptr;
  size_t n_ledgers = 0;
};

struct Path {
  size_t dim = 0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> states;  // (n+1) × dim, row-major
  std::vector<std::string> ledger_names;
  std::vector<std::vector<double>> ledgers;  // cumulative, aligned with times
  PathStatus status = PathStatus::alive;
  double end_time = 0.0;
  const double* state(size_t i) const { return &states[i * dim]; }
  size_t n_steps() const { return times.empty() ? 0 : times.size() - 1; }
};

// ---------------------------------------------------------------- step ops

struct SkewEvent {
  bool triggered = false;
  double value = 0.0;  // re-signed coordinate (or radius)
  bool went_up = false;
};

// v0 → v1 across/into the band of `level`; flips the post-distance sign
inline SkewEvent skew_cross_1d(double v0, double v1, double level, double beta,
                               double band, CounterRng& rng) {
  SkewEvent e;
  const bool crossed = (v0 - level) * (v1 - level) <= 0.0;
  const bool in_band = std::fabs(v1 - level) <= band;
  if (!crossed && !in_band) {
    e.value = v1;
    return e;
  }
  const double xi = rng.next_sign(beta);
  e.triggered = true;
  e.went_up = xi > 0.0;
  e.value = level + xi * std::fabs(v1 - level);
  return e;
}

inline SkewEvent skew_cross_hyperplane(double u_pre, double u_post, const Interface& f,
                                       double band, CounterRng& rng) {
  return skew_cross_1d(u_pre, u_post, f.level, f.beta, band, rng);
}

inline SkewEvent skew_cross_sphere(double r_pre, double r_post, const Interface& f,
                                   double band, CounterRng& rng) {
  SkewEvent e = skew_cross_1d(r_pre, r_post, f.level, f.beta, band, rng);
  // radial coordinate stays nonnegative; a flip past the origin mirrors back
  e.value = std::fabs(e.value);
  return e;
}

// tamed Euler proposal: out = x + b̃dt + √dt·z
inline void drift_step(const WeightSpec& w, const SimConfig& cfg, const double* x,
                       const double* z, double* out) {
  const size_t d = size_t(w.dim);
  const double r = norm(x, d);
  const double coef = drift_coef(w.rho, r);
  const double bn = std::fabs(coef) * r;
  const double scale = bn > cfg.drift_cap ? cfg.drift_cap / bn : 1.0;
  const double cdt = coef * scale * cfg.dt;
  const double sq = std::sqrt(cfg.dt);
  for (size_t i = 0; i < d; ++i) out[i] = x[i] + cdt * x[i] + sq * z[i];
}

inline bool kill_check(const WeightSpec& w, const double* x, size_t d, double floor) {
  return rho_radial(w.rho, norm(x, d)) <= floor;
}

// ---------------------------------------------------------------- engine

class Stepper {
 public:
  Stepper(const WeightSpec& w, const SimConfig& cfg) : w_(w), cfg_(cfg) {
    validate(w, /*for_simulation=*/true);
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("sim: dt must be positive");
    if (cfg.horizon < cfg.dt) throw std::invalid_argument("sim: horizon < dt");
    if (!(cfg.drift_cap > 0.0)) throw std::invalid_argument("sim: drift cap must be positive");
    dim_ = size_t(w.dim);
    sqdt_ = std::sqrt(cfg.dt);
    eps_ = cfg.skew_band > 0.0 ? cfg.skew_band : sqdt_;
    if (eps_ < sqdt_) throw std::invalid_argument("sim: skew band must be >= sqrt(dt)");
    obs_eps_ = cfg.observer_band > 0.0 ? cfg.observer_band : 2.0 * sqdt_;
    n_steps_ = size_t(std::llround(cfg.horizon / cfg.dt));
    if (n_steps_ < 1) n_steps_ = 1;

    const InterfaceSet set = skew_interfaces(w, cfg.interface_threshold);
    for (const Interface& f : set.kept) {
      if (f.geom == InterfaceGeom::domain_boundary)
        throw std::invalid_argument(
            "sim: skew dynamics on a general domain boundary are unsupported; "
            "use an origin-centred ball or a last-axis half-space");
      add_band(f, eps_, /*dynamic=*/true);
    }
    for (const Interface& f : cfg.observer_levels) add_band(f, obs_eps_, false);

    if (cfg.mode == Mode::reflected) {
      if (cfg.domain.kind != DomainKind::ball &&
          cfg.domain.kind != DomainKind::half_space &&
          cfg.domain.kind != DomainKind::polytope)
        throw std::invalid_argument("sim: reflected mode needs a bounded-geometry domain");
      boundary_slot_ = int(bands_.size());
      ledger_names_.push_back("boundary");
    }

    check_gaps();
    startable_ = state_space(w, cfg.mode,
                             cfg.mode == Mode::reflected ? &cfg.domain : nullptr);
    need_radius_ = w.rho.kind != RhoKind::constant || !sphere_idx_.empty() ||
                   cfg.mode == Mode::killed;
  }

  size_t dim() const { return dim_; }
  size_t n_steps() const { return n_steps_; }
  double dt() const { return cfg_.dt; }
  size_t n_ledgers() const { return ledger_names_.size(); }
  const std::vector<std::string>& ledger_names() const { return ledger_names_; }
  int boundary_slot() const { return boundary_slot_; }
  const std::vector<Interface>& bands() const { return bands_; }
  const StateSpace& startable() const { return startable_; }
  const SimConfig& config() const { return cfg_; }
  const WeightSpec& weight() const { return w_; }
  double skew_band() const { return eps_; }

  struct State {
    std::vector<double> x, prev, z;
    double t = 0.0;
    PathStatus status = PathStatus::alive;
    double rho_floor = 0.0;
  };

  void init(State& s, const Vec& x0) const {
    if (x0.size() != dim_) throw std::invalid_argument("sim: x0 dimension mismatch");
    if (!startable_.domain.contains(x0.data(), dim_))
      throw std::invalid_argument("sim: start point outside the startable set (" +
                                  startable_.description + ")");
    s.x.assign(x0.begin(), x0.end());
    s.prev.assign(dim_, 0.0);
    s.z.resize(dim_);
    s.t = 0.0;
    s.status = PathStatus::alive;
    s.rho_floor =
        cfg_.kill_floor_scale * std::max(1.0, rho_radial(w_.rho, norm(x0)));
  }

  StepOutcome advance(State& s, CounterRng& rng, double* inc) const {
    StepOutcome out;
    std::swap(s.prev, s.x);     // current state becomes the pre-state...
    double* x = s.prev.data();  // ...and the old prev buffer is post scratch
    double* y = s.x.data();
    const size_t d = dim_;

    const double r_pre = need_radius_ || !sphere_idx_.empty() ? norm(x, d) : 0.0;
    const double u_pre = x[d - 1];

    // band-occupation ledger increments (pre-state rule)
    for (size_t i = 0; i < bands_.size(); ++i) {
      const Interface& b = bands_[i];
      const double v = b.geom == InterfaceGeom::sphere ? r_pre : u_pre;
      inc[i] = std::fabs(v - b.level) <= band_eps_[i] ? cfg_.dt / (2.0 * band_eps_[i]) : 0.0;
    }
    if (boundary_slot_ >= 0) inc[boundary_slot_] = 0.0;

    // tamed Euler proposal
    const double coef = drift_coef(w_.rho, r_pre);
    const double bn = std::fabs(coef) * r_pre;
    const double scale = bn > cfg_.drift_cap ? cfg_.drift_cap / bn : 1.0;
    const double cdt = coef * scale * cfg_.dt;
    rng.fill_normal(s.z.data(), d);
    for (size_t i = 0; i < d; ++i) y[i] = x[i] + cdt * x[i] + sqdt_ * s.z[i];

    // skew crossings: φ's pieces are separated by > 6√dt (checked at
    // construction), so at most one level is in play per step
    if (!hyper_idx_.empty()) {
      const int hit = find_hit(hyper_levels_, u_pre, y[d - 1]);
      if (hit >= 0) {
        const size_t slot = hyper_idx_[size_t(hit)];
        const SkewEvent e = skew_cross_1d(u_pre, y[d - 1], bands_[slot].level,
                                          bands_[slot].beta, eps_, rng);
        if (e.triggered) {
          y[d - 1] = e.value;
          out.skewed = true;
          out.iface = int(slot);
        }
      }
    }
    if (!sphere_idx_.empty()) {
      const double r_post = norm(y, d);
      const int hit = find_hit(sphere_levels_, r_pre, r_post);
      if (hit >= 0 && r_post > 0.0) {
        const size_t slot = sphere_idx_[size_t(hit)];
        const SkewEvent e = skew_cross_sphere(r_pre, r_post, bands_[slot], eps_, rng);
        if (e.triggered) {
          const double f = e.value / r_post;
          for (size_t i = 0; i < d; ++i) y[i] *= f;
          out.skewed = true;
          out.iface = int(slot);
        }
      }
    }

    if (cfg_.mode == Mode::reflected && !cfg_.domain.contains(y, d)) {
      std::vector<double> proj(d);  // cold path: boundary excursions only
      const double moved = cfg_.domain.project(y, proj.data(), d);
      std::copy(proj.begin(), proj.end(), y);
      inc[boundary_slot_] += moved;
      out.reflected = true;
    }

    if (cfg_.mode == Mode::killed &&
        rho_radial(w_.rho, norm(y, d)) <= s.rho_floor) {
      out.killed = true;
      s.status = PathStatus::killed;
    }

    if (!all_finite(y, d)) {
      out.diverged = true;
      s.status = PathStatus::diverged;
    }

    s.t += cfg_.dt;
    return out;
  }

 private:
  void add_band(const Interface& f, double eps, bool dynamic) {
    const size_t slot = bands_.size();
    bands_.push_back(f);
    band_eps_.push_back(eps);
    const char* g = f.geom == InterfaceGeom::sphere ? "sphere@" : "plane@";
    ledger_names_.push_back(g + std::to_string(f.level) +
                            (dynamic ? "" : " (observer)"));
    if (!dynamic) return;
    if (f.geom == InterfaceGeom::sphere) {
      sphere_levels_.push_back(f.level);
      sphere_idx_.push_back(slot);
    } else {
      hyper_levels_.push_back(f.level);
      hyper_idx_.push_back(slot);
    }
  }

  void check_gaps() const {
    const double min_gap = 6.0 * sqdt_;
    auto check = [&](const std::vector<double>& ls, bool radial) {
      for (size_t i = 0; i + 1 < ls.size(); ++i)
        if (ls[i + 1] - ls[i] <= min_gap)
          throw std::invalid_argument(
              "sim: interface separation must exceed 6*sqrt(dt); refine dt");
      if (radial && !ls.empty() && ls.front() <= min_gap)
        throw std::invalid_argument(
            "sim: innermost sphere interface too close to the origin for this dt");
    };
    check(hyper_levels_, false);
    check(sphere_levels_, true);
  }

  // first level crossed in travel direction, else a level whose band holds v1
  int find_hit(const std::vector<double>& levels, double v0, double v1) const {
    if (levels.empty()) return -1;
    const size_t c = size_t(std::upper_bound(levels.begin(), levels.end(), v0) -
                            levels.begin());
    const int lower = int(c) - 1, upper = c < levels.size() ? int(c) : -1;
    const int first = v1 >= v0 ? upper : lower;
    const int second = v1 >= v0 ? lower : upper;
    for (int cand : {first, second}) {
      if (cand < 0) continue;
      const double a = levels[size_t(cand)];
      if ((v0 - a) * (v1 - a) <= 0.0 || std::fabs(v1 - a) <= eps_) return cand;
    }
    return -1;
  }

  WeightSpec w_;
  SimConfig cfg_;
  size_t dim_ = 0, n_steps_ = 0;
  double sqdt_ = 0.0, eps_ = 0.0, obs_eps_ = 0.0;
  bool need_radius_ = false;
  std::vector<Interface> bands_;   // dynamic interfaces then observers
  std::vector<double> band_eps_;
  std::vector<std::string> ledger_names_;
  std::vector<double> hyper_levels_, sphere_levels_;  // ascending (dynamic only)
  std::vector<size_t> hyper_idx_, sphere_idx_;
  int boundary_slot_ = -1;
  StateSpace startable_;
};

// Runs paths i ∈ [0, n_paths); start(i) gives the initial point, make_obs(i)
// builds the per-path observer, which receives every StepView and a final
// callback. Worker threads own disjoint contiguous index ranges; per-path RNG
// streams make the results partition-independent.
template <class StartFn, class MakeObs>
void run_paths_from(const Stepper& st, StartFn&& start, size_t n_paths,
                    uint64_t seed, int workers, MakeObs&& make_obs) {
  const size_t w = size_t(std::max(1, workers));
  std::exception_ptr error;
  std::mutex error_mu;

  auto work = [&](size_t lo, size_t hi) {
    try {
      Stepper::State s;
      std::vector<double> inc(std::max<size_t>(1, st.n_ledgers()));
      for (size_t i = lo; i < hi; ++i) {
        CounterRng rng(seed, i);
        st.init(s, start(i));
        auto obs = make_obs(i);
        for (size_t k = 0; k < st.n_steps(); ++k) {
          const StepOutcome o = st.advance(s, rng, inc.data());
          StepView v;
          v.k = k;
          v.t_post = double(k + 1) * st.dt();
          v.pre = s.prev.data();
          v.post = s.x.data();
          v.dim = st.dim();
          v.outcome = o;
          v.ledger_inc = inc.data();
          v.n_ledgers = st.n_ledgers();
          obs.step(v);
          if (s.status != PathStatus::alive) break;
        }
        obs.finish(s);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
    }
  };

  if (w <= 1 || n_paths < 2) {
    work(0, n_paths);
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (n_paths + w - 1) / w;
    for (size_t t = 0; t < w; ++t) {
      const size_t lo = t * chunk, hi = std::min(n_paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

template <class MakeObs>
void run_paths(const Stepper& st, const Vec& x0, size_t n_paths, uint64_t seed,
               int workers, MakeObs&& make_obs) {
  run_paths_from(st, [&](size_t) -> const Vec& { return x0; }, n_paths, seed,
                 workers, std::forward<MakeObs>(make_obs));
}

// materialized single path (states, times, cumulative ledgers)
Path simulate(const WeightSpec& w, const SimConfig& cfg, const Vec& x0,
              uint64_t seed, uint64_t path_index = 0);

}  // namespace skewflow
