#include "skewflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "skewflow/rng.hpp"
#include "skewflow/stats.hpp"
#include "skewflow/weights.hpp"

namespace skewflow {

// ------------------------------------------------------------ Gauss-Legendre

static GlRule make_rule(int n) {
  GlRule r;
  r.x.resize(size_t(n));
  r.w.resize(size_t(n));
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(M_PI * (double(k) + 0.75) / (double(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence for P_n(x) and P'_n(x)
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / double(j);
        p0 = p1;
        p1 = p2;
      }
      dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[size_t(k)] = -x;
    r.w[size_t(k)] = w;
    r.x[size_t(n - 1 - k)] = x;
    r.w[size_t(n - 1 - k)] = w;
  }
  return r;
}

const GlRule& gauss_legendre(int n) {
  static std::map<int, GlRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
  return it->second;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b, int n) {
  const GlRule& r = gauss_legendre(n);
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  KahanSum s;
  for (size_t i = 0; i < r.x.size(); ++i) s.add(r.w[i] * f(m + h * r.x[i]));
  return h * s.value();
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              std::vector<double> breakpoints, double rel_tol,
                              int max_panels, double min_width) {
  struct Panel {
    double a, b, value, err;
    bool refinable;
  };
  auto eval = [&](double lo, double hi) {
    Panel p{lo, hi, 0.0, 0.0, true};
    const double v32 = gl_integrate(f, lo, hi, 32);
    const double v16 = gl_integrate(f, lo, hi, 16);
    p.value = v32;
    p.err = std::fabs(v32 - v16);
    p.refinable = (hi - lo) > min_width;
    return p;
  };

  breakpoints.push_back(a);
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<Panel> panels;
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double lo = std::max(a, breakpoints[i]);
    const double hi = std::min(b, breakpoints[i + 1]);
    if (hi > lo) panels.push_back(eval(lo, hi));
  }
  if (panels.empty()) return {0.0, 0.0, true};

  QuadResult out;
  while (true) {
    KahanSum val, err;
    size_t worst = panels.size();
    double worst_err = 0.0;
    for (size_t i = 0; i < panels.size(); ++i) {
      val.add(panels[i].value);
      err.add(panels[i].err);
      if (panels[i].refinable && panels[i].err > worst_err) {
        worst_err = panels[i].err;
        worst = i;
      }
    }
    out.value = val.value();
    out.abs_error = err.value();
    const double tol = rel_tol * std::max(std::fabs(out.value), 1e-300);
    if (out.abs_error <= tol) {
      out.converged = true;
      return out;
    }
    if (worst == panels.size() || int(panels.size()) >= max_panels) {
      // unresolved (possibly divergent) mass at the panel floor or budget;
      // out.value carries the floor-regularized estimate
      out.converged = false;
      return out;
    }
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    panels[worst] = eval(p.a, mid);
    panels.push_back(eval(mid, p.b));
  }
}

double sphere_area(int d) {
  return 2.0 * std::pow(M_PI, 0.5 * double(d)) / std::tgamma(0.5 * double(d));
}

double ball_volume(int d, double r) {
  return std::pow(M_PI, 0.5 * double(d)) / std::tgamma(0.5 * double(d) + 1.0) *
         std::pow(r, double(d));
}

// ------------------------------------------------------------ radial weights

namespace {

constexpr double kFloor = 1e-13;  // absolute inner cutoff for divergent mass

bool phi_is_radial(const PhiSpec& p) {
  return p.kind == PhiKind::uniform || p.kind == PhiKind::annuli;
}

double phi_radial_value(const PhiSpec& p, double r) {
  if (p.kind == PhiKind::uniform) return p.c;
  if (r < p.m0) {
    const size_t idx = size_t(std::upper_bound(p.inner_levels.begin(),
                                               p.inner_levels.end(), r) -
                              p.inner_levels.begin());
    return p.inner_values[idx];
  }
  const size_t idx = size_t(std::upper_bound(p.outer_levels.begin(),
                                             p.outer_levels.end(), r) -
                            p.outer_levels.begin());
  return p.outer_values[idx];
}

std::vector<double> radial_breakpoints(const WeightSpec& w, double lo, double hi) {
  std::vector<double> bp;
  if (w.phi.kind == PhiKind::annuli) {
    for (double l : w.phi.inner_levels) bp.push_back(l);
    bp.push_back(w.phi.m0);
    for (double l : w.phi.outer_levels) bp.push_back(l);
  }
  if (w.rho.kind == RhoKind::log_modified) bp.push_back(1.0);
  std::vector<double> out;
  for (double b : bp)
    if (b > lo && b < hi) out.push_back(b);
  std::sort(out.begin(), out.end());
  return out;
}

// ∫_{lo}^{hi} v^p dv with divergence handling at lo == 0
struct PowerSegment {
  double value = 0.0;
  bool converged = true;
};

PowerSegment power_integral(double p, double lo, double hi) {
  PowerSegment s;
  if (lo == 0.0 && p <= -1.0) {
    s.converged = false;
    lo = kFloor;  // regularize; caller reports non-convergence
    if (hi <= lo) {
      s.value = 0.0;
      return s;
    }
  }
  if (std::fabs(p + 1.0) < 1e-12) {
    s.value = std::log(hi / std::max(lo, kFloor * kFloor));
  } else {
    const double q = p + 1.0;
    const double hq = std::pow(hi, q);
    const double lq = lo > 0.0 ? std::pow(lo, q) : 0.0;
    s.value = (hq - lq) / q;
  }
  return s;
}

// ∫_{lo}^{hi} (ρφ)^sign(v) · v^{d_pow} dv over one φ-constant segment
PowerSegment weight_segment(const WeightSpec& w, int sign, double d_pow, double lo,
                            double hi) {
  const double gamma = phi_is_radial(w.phi)
                           ? std::pow(phi_radial_value(w.phi, 0.5 * (lo + hi)), sign)
                           : 1.0;
  PowerSegment s;
  switch (w.rho.kind) {
    case RhoKind::constant: {
      s = power_integral(d_pow, lo, hi);
      s.value *= gamma * std::pow(w.rho.c, sign);
      return s;
    }
    case RhoKind::radial_power: {
      s = power_integral(double(sign) * w.rho.alpha + d_pow, lo, hi);
      s.value *= gamma;
      return s;
    }
    case RhoKind::log_modified: {
      auto f = [&](double v) {
        return std::pow(rho_radial(w.rho, v), sign) * std::pow(v, d_pow);
      };
      const QuadResult q = integrate_adaptive(f, lo, hi, {}, 1e-11, 2048, kFloor);
      s.value = gamma * q.value;
      s.converged = q.converged;
      return s;
    }
  }
  return s;
}

// F(u) = ∫_0^u (ρφ)^sign(v) v^{d_pow} dv as a piecewise primitive
struct RadialPrimitive {
  const WeightSpec* w;
  int sign;
  double d_pow;
  std::vector<double> knots;  // 0 = knots[0] < ... < knots.back() = domain end
  std::vector<double> cum;    // cumulative integral up to each knot
  bool converged = true;

  void build(const WeightSpec& spec, int s, double dp, double upper) {
    w = &spec;
    sign = s;
    d_pow = dp;
    knots = radial_breakpoints(spec, 0.0, upper);
    knots.insert(knots.begin(), 0.0);
    knots.push_back(upper);
    cum.assign(knots.size(), 0.0);
    for (size_t i = 0; i + 1 < knots.size(); ++i) {
      const PowerSegment seg = weight_segment(spec, sign, d_pow, knots[i], knots[i + 1]);
      converged = converged && seg.converged;
      cum[i + 1] = cum[i] + seg.value;
    }
  }

  double operator()(double u) const {
    if (u <= 0.0) return 0.0;
    const size_t idx = std::min(
        size_t(std::upper_bound(knots.begin(), knots.end(), u) - knots.begin()),
        knots.size() - 1);
    const double lo = knots[idx - 1];
    return cum[idx - 1] + weight_segment(*w, sign, d_pow, lo, std::min(u, knots.back()))
                              .value;
  }
};

MassResult ball_mass_mc(const WeightSpec& w, const Vec& center, double radius, int sign,
                        size_t budget) {
  // deterministic fixed-key stream: quadrature is a pure function of inputs
  CounterRng rng(0x5EEDF00Dull, 17);
  const size_t d = size_t(w.dim);
  std::vector<double> z(d), x(d);
  KahanSum sum, sum2;
  for (size_t i = 0; i < budget; ++i) {
    rng.fill_normal(z.data(), d);
    const double zn = norm(z.data(), d);
    const double rr = radius * std::pow(rng.next_uniform(), 1.0 / double(d));
    for (size_t j = 0; j < d; ++j)
      x[j] = (j < center.size() ? center[j] : 0.0) + rr * z[j] / zn;
    const double v = std::pow(eval_weight(w, x.data(), d), sign);
    sum.add(v);
    sum2.add(v * v);
  }
  const double n = double(budget);
  const double mean = sum.value() / n;
  const double var = std::max(0.0, sum2.value() / n - mean * mean);
  const double vol = ball_volume(w.dim, radius);
  MassResult r;
  r.value = vol * mean;
  r.abs_error = 3.0 * vol * std::sqrt(var / n);
  r.used_mc = true;
  r.converged = std::isfinite(r.value) &&
                r.abs_error <= 0.02 * std::max(std::fabs(r.value), 1e-300);
  return r;
}

}  // namespace

MassResult ball_mass(const WeightSpec& w, const Vec& center, double radius, int sign,
                     size_t mc_budget) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball_mass: radius must be positive");
  if (sign != 1 && sign != -1) throw std::invalid_argument("ball_mass: sign must be ±1");
  const bool radial = phi_is_radial(w.phi);
  const double a = center.empty() ? 0.0 : norm(center);

  if (radial && a == 0.0) {
    // m(B_r(0)) = |S^{d-1}| ∫_0^r ψ^s(v) v^{d-1} dv, segment-analytic in the
    // power cases with the absolute floor regularizing divergent mass at 0
    MassResult out;
    std::vector<double> knots = radial_breakpoints(w, 0.0, radius);
    knots.insert(knots.begin(), 0.0);
    knots.push_back(radius);
    KahanSum sum;
    for (size_t i = 0; i + 1 < knots.size(); ++i) {
      const PowerSegment seg =
          weight_segment(w, sign, double(w.dim) - 1.0, knots[i], knots[i + 1]);
      out.converged = out.converged && seg.converged;
      sum.add(seg.value);
    }
    out.value = sphere_area(w.dim) * sum.value();
    out.abs_error = out.converged ? 1e-10 * std::fabs(out.value) : std::fabs(out.value);
    return out;
  }

  if (radial && w.dim == 3) {
    // chord reduction about the centre: with g = ψ^s radial and a = ‖c‖,
    //   ∫_{B_r(c)} g dx = (2π/a) ∫_0^r s·[F(a+s) − F(|a−s|)] ds,  F' (u) = u·g(u)
    RadialPrimitive F;
    F.build(w, sign, 1.0, a + radius);
    auto f = [&](double s) { return s * (F(a + s) - F(std::fabs(a - s))); };
    std::vector<double> bp;
    for (double k : F.knots) {
      if (std::fabs(k - a) < radius && std::fabs(k - a) > 0.0) bp.push_back(std::fabs(k - a));
      if (k - a > 0.0 && k - a < radius) bp.push_back(k - a);
    }
    if (a < radius) bp.push_back(a);  // |a−s| hits 0
    const QuadResult q = integrate_adaptive(f, 0.0, radius, bp, 1e-11, 2048, kFloor);
    MassResult out;
    out.value = 2.0 * M_PI / a * q.value;
    out.converged = q.converged && F.converged;
    out.abs_error = out.converged ? 2.0 * M_PI / a * q.abs_error : std::fabs(out.value);
    return out;
  }

  return ball_mass_mc(w, center, radius, sign, mc_budget);
}

A2Result a2_estimate(const WeightSpec& w, const Vec& center,
                     const std::vector<double>& radii) {
  if (radii.empty()) throw std::invalid_argument("a2_estimate: empty ball family");
  A2Result res;
  for (double r : radii) {
    const MassResult mw = ball_mass(w, center, r, 1);
    const MassResult mi = ball_mass(w, center, r, -1);
    const double vol = ball_volume(w.dim, r);
    A2Entry e;
    e.radius = r;
    e.avg_w = mw.value / vol;
    e.avg_winv = mi.value / vol;
    e.product = e.avg_w * e.avg_winv;
    e.converged = mw.converged && mi.converged;
    res.all_converged = res.all_converged && e.converged;
    res.entries.push_back(e);
  }
  double pmin = res.entries.front().product, pmax = pmin;
  bool incr = true, decr = true;
  for (size_t i = 0; i < res.entries.size(); ++i) {
    const double p = res.entries[i].product;
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
    if (i > 0) {
      // radii are ordered by the caller; track monotonicity along the family
      if (p > res.entries[i - 1].product * (1.0 + 1e-9)) decr = false;
      if (p < res.entries[i - 1].product * (1.0 - 1e-9)) incr = false;
    }
  }
  res.sup_product = pmax;
  res.spread = pmax / pmin;
  res.growth_factor = res.spread;
  res.monotone = incr || decr;
  return res;
}

}  // namespace skewflow
