#include "skewflow/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "skewflow/quadrature.hpp"
#include "skewflow/stats.hpp"

namespace skewflow {

namespace {

struct EndObs {
  double* value_slot;
  PathStatus* status_slot;
  const std::function<double(const Vec&)>* f;
  Vec scratch;
  void step(const StepView&) {}
  void finish(const Stepper::State& s) {
    *status_slot = s.status;
    if (s.status != PathStatus::alive) {
      *value_slot = 0.0;  // f(Δ) = 0
      return;
    }
    scratch.assign(s.x.begin(), s.x.end());
    *value_slot = (*f)(scratch);
  }
};

SemigroupEstimate reduce_estimate(const std::vector<double>& vals,
                                  const std::vector<PathStatus>& status) {
  SemigroupEstimate est;
  est.n_paths = vals.size();
  Welford mv;
  for (size_t i = 0; i < vals.size(); ++i) {
    mv.add(vals[i]);
    if (status[i] == PathStatus::killed) ++est.n_killed;
    if (status[i] == PathStatus::diverged) ++est.n_diverged;
  }
  est.value = mv.mean();
  est.se = mv.stderror();
  return est;
}

void clamp_dt(SimConfig& cfg, double t) {
  cfg.horizon = t;
  if (cfg.dt > t) cfg.dt = t;
}

}  // namespace

SemigroupEstimate mc_semigroup(const WeightSpec& w, SimConfig cfg, const Vec& x,
                               double t, const std::function<double(const Vec&)>& f,
                               size_t n_paths, uint64_t seed, int workers) {
  clamp_dt(cfg, t);
  Stepper st(w, cfg);
  std::vector<double> vals(n_paths, 0.0);
  std::vector<PathStatus> status(n_paths, PathStatus::alive);
  run_paths(st, x, n_paths, seed, workers,
            [&](size_t i) { return EndObs{&vals[i], &status[i], &f, {}}; });
  return reduce_estimate(vals, status);
}

SemigroupEstimate mc_semigroup_from(const WeightSpec& w, SimConfig cfg,
                                    const std::vector<Vec>& starts, double t,
                                    const std::function<double(const Vec&)>& f,
                                    uint64_t seed, int workers) {
  clamp_dt(cfg, t);
  Stepper st(w, cfg);
  const size_t n = starts.size();
  std::vector<double> vals(n, 0.0);
  std::vector<PathStatus> status(n, PathStatus::alive);
  run_paths_from(st, [&](size_t i) -> const Vec& { return starts[i]; }, n, seed,
                 workers,
                 [&](size_t i) { return EndObs{&vals[i], &status[i], &f, {}}; });
  return reduce_estimate(vals, status);
}

size_t EndpointCloud::alive() const {
  size_t n = 0;
  for (PathStatus s : status)
    if (s == PathStatus::alive) ++n;
  return n;
}

EndpointCloud mc_endpoints(const WeightSpec& w, SimConfig cfg, const Vec& x, double t,
                           size_t n_paths, uint64_t seed, int workers) {
  clamp_dt(cfg, t);
  Stepper st(w, cfg);
  EndpointCloud cloud;
  cloud.dim = st.dim();
  cloud.states.assign(n_paths * st.dim(), std::numeric_limits<double>::quiet_NaN());
  cloud.status.assign(n_paths, PathStatus::alive);
  struct Obs {
    double* row;
    PathStatus* stat;
    size_t dim;
    void step(const StepView&) {}
    void finish(const Stepper::State& s) {
      *stat = s.status;
      if (s.status == PathStatus::alive)
        std::copy(s.x.begin(), s.x.end(), row);
    }
  };
  run_paths(st, x, n_paths, seed, workers, [&](size_t i) {
    return Obs{&cloud.states[i * cloud.dim], &cloud.status[i], cloud.dim};
  });
  return cloud;
}

FellerReport feller_check(const WeightSpec& w, const SimConfig& cfg, const Bump& f,
                          const std::vector<Vec>& grid, const std::vector<double>& ts,
                          const Vec& far_x, double far_t, double far_tol,
                          size_t n_paths, uint64_t seed, int workers) {
  FellerReport rep;
  rep.trend_ok = true;
  uint64_t run = 0;
  for (const Vec& x : grid) {
    std::vector<FellerRow> rows;
    for (double t : ts) {
      SimConfig c = cfg;
      c.dt = std::min(cfg.dt, t / 100.0);
      const SemigroupEstimate est =
          mc_semigroup(w, c, x, t, [&](const Vec& y) { return f(y); }, n_paths,
                       seed + 1000 * (++run), workers);
      FellerRow row;
      row.x = x;
      row.t = t;
      row.gap = std::fabs(est.value - f(x));
      row.se = est.se;
      rows.push_back(row);
    }
    // decreasing trend in t (ts given decreasing): noise-tolerant pointwise
    // comparisons plus a strict overall drop
    for (size_t k = 1; k < rows.size(); ++k)
      if (rows[k].gap > rows[k - 1].gap + 2.0 * (rows[k].se + rows[k - 1].se))
        rep.trend_ok = false;
    if (!(rows.back().gap < rows.front().gap)) rep.trend_ok = false;
    rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
  }
  SimConfig c = cfg;
  c.dt = std::min(cfg.dt, far_t / 100.0);
  const SemigroupEstimate far = mc_semigroup(
      w, c, far_x, far_t, [&](const Vec& y) { return f(y); }, n_paths,
      seed + 777777, workers);
  rep.far_value = far.value;
  rep.far_se = far.se;
  rep.far_ok = far.value < far_tol;
  rep.pass = rep.trend_ok && rep.far_ok;
  return rep;
}

namespace {
// exact upper bound for ψ on a box (rejection sampling needs a true bound)
double psi_box_bound(const WeightSpec& w, const Vec& lo, const Vec& hi) {
  const size_t d = size_t(w.dim);
  double r2min = 0.0, r2max = 0.0;
  for (size_t i = 0; i < d; ++i) {
    const double nearest = std::clamp(0.0, lo[i], hi[i]);
    r2min += nearest * nearest;
    r2max += std::max(lo[i] * lo[i], hi[i] * hi[i]);
  }
  double rho_bound;
  switch (w.rho.kind) {
    case RhoKind::constant:
      rho_bound = w.rho.c;
      break;
    case RhoKind::radial_power: {
      const double rmin = std::sqrt(r2min), rmax = std::sqrt(r2max);
      if (w.rho.alpha < 0.0 && rmin == 0.0)
        throw std::invalid_argument("symmetry: box must avoid the origin for alpha < 0");
      rho_bound = w.rho.c * std::max(std::pow(rmax, w.rho.alpha),
                                     rmin > 0.0 ? std::pow(rmin, w.rho.alpha) : 0.0);
      break;
    }
    default:
      throw std::invalid_argument("symmetry: box sampling supports constant/radial-power rho");
  }
  return rho_bound * phi_max(w.phi);
}
}  // namespace

SymmetryReport symmetry_check(const WeightSpec& w, const SimConfig& cfg, const Bump& f,
                              const Bump& g, double t, const Vec& box_lo,
                              const Vec& box_hi, size_t n_paths, uint64_t seed,
                              int workers, double tol) {
  const size_t d = size_t(w.dim);
  for (size_t i = 0; i < d; ++i) {
    if (f.center[i] - f.radius < box_lo[i] || f.center[i] + f.radius > box_hi[i] ||
        g.center[i] - g.radius < box_lo[i] || g.center[i] + g.radius > box_hi[i])
      throw std::invalid_argument("symmetry: bump supports must lie inside the box");
  }
  const double bound = psi_box_bound(w, box_lo, box_hi);

  std::vector<Vec> starts(n_paths, Vec(d));
  std::vector<double> fs(n_paths), gs(n_paths);
  CounterRng rng(seed ^ 0xA5A5A5A5DEADBEEFull, 0);
  Vec x(d);
  for (size_t i = 0; i < n_paths; ++i) {
    for (;;) {
      for (size_t k = 0; k < d; ++k)
        x[k] = box_lo[k] + (box_hi[k] - box_lo[k]) * rng.next_uniform();
      if (rng.next_uniform() * bound <= eval_weight(w, x.data(), d)) break;
    }
    starts[i] = x;
    fs[i] = f(x);
    gs[i] = g(x);
  }

  SimConfig c = cfg;
  clamp_dt(c, t);
  Stepper st(w, c);
  std::vector<double> fe(n_paths, 0.0), ge(n_paths, 0.0);
  struct Obs {
    double* fe;
    double* ge;
    const Bump* f;
    const Bump* g;
    Vec scratch;
    void step(const StepView&) {}
    void finish(const Stepper::State& s) {
      if (s.status != PathStatus::alive) return;
      scratch.assign(s.x.begin(), s.x.end());
      *fe = (*f)(scratch);
      *ge = (*g)(scratch);
    }
  };
  run_paths_from(st, [&](size_t i) -> const Vec& { return starts[i]; }, n_paths,
                 seed, workers,
                 [&](size_t i) { return Obs{&fe[i], &ge[i], &f, &g, {}}; });

  Welford fwd, bwd, diff;
  for (size_t i = 0; i < n_paths; ++i) {
    const double a = fs[i] * ge[i], b = gs[i] * fe[i];
    fwd.add(a);
    bwd.add(b);
    diff.add(a - b);
  }
  SymmetryReport rep;
  rep.forward = fwd.mean();
  rep.backward = bwd.mean();
  rep.se_forward = fwd.stderror();
  rep.se_backward = bwd.stderror();
  rep.se_diff = diff.stderror();
  rep.n_paths = n_paths;
  const double scale = 0.5 * (std::fabs(rep.forward) + std::fabs(rep.backward));
  rep.rel_gap = scale > 0.0 ? std::fabs(rep.forward - rep.backward) / scale : 0.0;
  rep.pass = rep.rel_gap < tol;
  return rep;
}

KernelEstimate heat_kernel_estimate(const WeightSpec& w, const SimConfig& cfg,
                                    const Vec& x, double t,
                                    const std::vector<Vec>& grid,
                                    const std::vector<double>& cell_vol,
                                    size_t n_paths, uint64_t seed, int workers,
                                    double eps_bound, double bandwidth) {
  const EndpointCloud cloud = mc_endpoints(w, cfg, x, t, n_paths, seed, workers);
  const size_t d = cloud.dim, n = n_paths;

  KernelEstimate est;
  est.t = t;
  est.x = x;
  est.grid = grid;

  double h = bandwidth;
  if (h <= 0.0) {
    if (d > 16) throw std::invalid_argument("heat_kernel: dimension too large");
    // Silverman's rule with the coordinate-averaged standard deviation
    Welford per_coord[16];
    for (size_t i = 0; i < n; ++i) {
      if (cloud.status[i] != PathStatus::alive) continue;
      for (size_t k = 0; k < d; ++k) per_coord[k].add(cloud.states[i * d + k]);
    }
    double var = 0.0;
    for (size_t k = 0; k < d; ++k) var += per_coord[k].variance();
    const double sigma = std::sqrt(var / double(d));
    const size_t na = std::max<size_t>(1, cloud.alive());
    h = sigma * std::pow(4.0 / ((double(d) + 2.0) * double(na)), 1.0 / (double(d) + 4.0));
  }
  est.bandwidth = h;

  const double norm_c = std::pow(2.0 * kPi * h * h, 0.5 * double(d));
  est.density.assign(grid.size(), 0.0);
  est.se.assign(grid.size(), 0.0);
  double mass = 0.0;
  for (size_t j = 0; j < grid.size(); ++j) {
    Welford mv;
    for (size_t i = 0; i < n; ++i) {
      if (cloud.status[i] != PathStatus::alive) {
        mv.add(0.0);
        continue;
      }
      double q = 0.0;
      for (size_t k = 0; k < d; ++k) {
        const double dd = cloud.states[i * d + k] - grid[j][k];
        q += dd * dd;
      }
      mv.add(std::exp(-0.5 * q / (h * h)));
    }
    const double psi = eval_weight(w, grid[j].data(), d);
    est.density[j] = mv.mean() / (norm_c * psi);
    est.se[j] = mv.stderror() / (norm_c * psi);
    mass += est.density[j] * psi * cell_vol[j];
  }
  est.mass = mass;

  // smallest c with p̂(y) ≤ c·exp(−‖x−y‖²/((4+ε)t))/m(B_√t(y)) on the bulk
  double c = 0.0;
  size_t bulk = 0;
  for (size_t j = 0; j < grid.size(); ++j) {
    if (!(est.density[j] > 0.0) || est.se[j] > 0.2 * est.density[j]) continue;
    ++bulk;
    const double gauss =
        std::exp(-dist2(x.data(), grid[j].data(), d) / ((4.0 + eps_bound) * t));
    const MassResult mb = ball_mass(w, grid[j], std::sqrt(t));
    c = std::max(c, est.density[j] * mb.value / gauss);
  }
  est.bulk_points = bulk;
  est.fitted_c = c;
  est.bound_holds = bulk > 0 && std::isfinite(c);
  return est;
}

NashReport nash_probe(const WeightSpec& w, double ball_radius, double delta) {
  if (w.phi.kind != PhiKind::uniform)
    throw std::invalid_argument("nash: radial quadrature needs a uniform phi");
  if (w.rho.kind == RhoKind::log_modified)
    throw std::invalid_argument("nash: radial quadrature supports constant/radial-power rho");
  const int d = w.dim;
  const double R = ball_radius;
  const double nu = d >= 3 ? double(d) : double(d) + delta;
  const double area = sphere_area(d);

  struct Fn {
    std::string name;
    std::function<double(double)> f, df;
    double edge;  // support radius (breakpoint)
  };
  auto bump = [](double s) {
    return [s](double r) {
      const double u = (r * r) / (s * s);
      return u < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u)) : 0.0;
    };
  };
  auto dbump = [](double s) {
    return [s](double r) {
      const double u = (r * r) / (s * s);
      if (u >= 1.0) return 0.0;
      const double v = 1.0 - u;
      return std::exp(1.0 - 1.0 / v) * (-2.0 * r / (s * s)) / (v * v);
    };
  };
  std::vector<Fn> fns;
  for (double s : {R, 0.5 * R, 0.25 * R})
    fns.push_back({"bump(" + std::to_string(s) + ")", bump(s), dbump(s), s});
  {
    const double k = 4.0 * kPi / R;
    auto b = bump(R);
    auto db = dbump(R);
    fns.push_back({"oscillatory",
                   [b, k](double r) { return b(r) * std::cos(k * r); },
                   [b, db, k](double r) {
                     return db(r) * std::cos(k * r) - b(r) * k * std::sin(k * r);
                   },
                   R});
  }
  fns.push_back({"tent", [R](double r) { return r < R ? 1.0 - r / R : 0.0; },
                 [R](double r) { return r < R ? -1.0 / R : 0.0; }, R});

  NashReport rep;
  rep.exponent = nu;
  const double cphi = w.phi.c;
  auto psi_rad = [&](double r) { return rho_radial(w.rho, r) * cphi; };
  double cmax = 0.0;
  bool ok = true;
  for (const Fn& fn : fns) {
    const std::vector<double> bps = {fn.edge};
    auto wgt = [&](double r) { return psi_rad(r) * std::pow(r, double(d - 1)); };
    const double l1 =
        area * integrate_adaptive([&](double r) { return std::fabs(fn.f(r)) * wgt(r); },
                                  0.0, R, bps)
                   .value;
    const double l2sq =
        area * integrate_adaptive([&](double r) { return fn.f(r) * fn.f(r) * wgt(r); },
                                  0.0, R, bps)
                   .value;
    const double energy =
        0.5 * area *
        integrate_adaptive([&](double r) { return fn.df(r) * fn.df(r) * wgt(r); },
                           0.0, R, bps)
            .value;
    NashRow row;
    row.fn = fn.name;
    row.l1 = l1;
    row.l2sq = l2sq;
    row.energy = energy;
    row.lhs = std::pow(l2sq, 1.0 + 2.0 / nu);
    row.bracket = (energy + l2sq) * std::pow(l1, 4.0 / nu);
    row.c_required = row.bracket > 0.0 ? row.lhs / row.bracket : 0.0;
    if (!std::isfinite(row.c_required)) ok = false;
    cmax = std::max(cmax, row.c_required);
    rep.rows.push_back(row);
  }
  rep.fitted_c = cmax;
  rep.pass = ok && cmax > 0.0 && std::isfinite(cmax);
  return rep;
}

MomentReport bessel_moment_check(double alpha, int d, const Vec& x0,
                                 const std::vector<double>& ts, double dt,
                                 size_t n_paths, uint64_t seed, int workers,
                                 double tol) {
  WeightSpec w;
  w.dim = d;
  w.rho.kind = alpha == 0.0 ? RhoKind::constant : RhoKind::radial_power;
  w.rho.alpha = alpha;
  w.phi.kind = PhiKind::uniform;

  SimConfig cfg;
  cfg.dt = dt;
  cfg.horizon = *std::max_element(ts.begin(), ts.end());
  Stepper st(w, cfg);

  std::vector<size_t> kidx;
  for (double t : ts) kidx.push_back(size_t(std::llround(t / dt)));
  std::vector<double> slots(n_paths * ts.size(), 0.0);
  struct Obs {
    double* row;
    const std::vector<size_t>* kidx;
    void step(const StepView& v) {
      for (size_t j = 0; j < kidx->size(); ++j)
        if (v.k + 1 == (*kidx)[j]) row[j] = norm2(v.post, v.dim);
    }
    void finish(const Stepper::State&) {}
  };
  run_paths(st, x0, n_paths, seed, workers,
            [&](size_t i) { return Obs{&slots[i * ts.size()], &kidx}; });

  MomentReport rep;
  rep.pass = true;
  const double r0sq = norm2(x0.data(), x0.size());
  for (size_t j = 0; j < ts.size(); ++j) {
    Welford mv;
    for (size_t i = 0; i < n_paths; ++i) mv.add(slots[i * ts.size() + j]);
    MomentRow row;
    row.t = ts[j];
    row.target = r0sq + (double(d) + alpha) * ts[j];
    row.estimate = mv.mean();
    row.se = mv.stderror();
    row.pass = std::fabs(row.estimate - row.target) <= tol * row.target;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace skewflow
