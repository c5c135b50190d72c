#include "skewflow/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace skewflow {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// overall cap on ‖b‖·r so that tamed drift never sees inf/NaN near the
// singular shells ({0}, and ‖x‖=1 for log-modified weights)
constexpr double kCoefCap = 1e15;
}  // namespace

// ---------------------------------------------------------------- Domain

bool Domain::contains(const double* x, size_t d) const {
  switch (kind) {
    case DomainKind::full_space:
      return true;
    case DomainKind::punctured_origin:
      return norm2(x, d) > 0.0;
    case DomainKind::ball: {
      double s = 0.0;
      for (size_t i = 0; i < d; ++i) {
        const double t = x[i] - (i < center.size() ? center[i] : 0.0);
        s += t * t;
      }
      return s <= radius * radius;
    }
    case DomainKind::half_space:
      return double(side) * (x[size_t(axis)] - level) <= 0.0;
    case DomainKind::polytope:
      for (size_t k = 0; k < normals.size(); ++k)
        if (dot(normals[k].data(), x, d) > offsets[k]) return false;
      return true;
  }
  return true;
}

double Domain::project(const double* x, double* out, size_t d) const {
  switch (kind) {
    case DomainKind::full_space:
    case DomainKind::punctured_origin:
      std::copy(x, x + d, out);
      return 0.0;
    case DomainKind::ball: {
      double s = 0.0;
      for (size_t i = 0; i < d; ++i) {
        out[i] = x[i] - (i < center.size() ? center[i] : 0.0);
        s += out[i] * out[i];
      }
      const double r = std::sqrt(s);
      if (r <= radius) {
        std::copy(x, x + d, out);
        return 0.0;
      }
      const double scale = radius / r;
      for (size_t i = 0; i < d; ++i)
        out[i] = (i < center.size() ? center[i] : 0.0) + out[i] * scale;
      return r - radius;
    }
    case DomainKind::half_space: {
      std::copy(x, x + d, out);
      const double g = double(side) * (x[size_t(axis)] - level);
      if (g <= 0.0) return 0.0;
      out[size_t(axis)] = level;
      return g;
    }
    case DomainKind::polytope: {
      // Dykstra's alternating projections onto the halfspaces: converges to
      // the nearest point of the intersection (violations here are one Euler
      // step deep, so a few sweeps suffice)
      std::vector<double> y(x, x + d);
      std::vector<std::vector<double>> corr(normals.size(), std::vector<double>(d, 0.0));
      for (int sweep = 0; sweep < 64; ++sweep) {
        double moved = 0.0;
        for (size_t k = 0; k < normals.size(); ++k) {
          std::vector<double> z(d);
          for (size_t i = 0; i < d; ++i) z[i] = y[i] + corr[k][i];
          const double nn = norm2(normals[k].data(), d);
          const double g = dot(normals[k].data(), z.data(), d) - offsets[k];
          for (size_t i = 0; i < d; ++i) {
            const double yi = (g > 0.0) ? z[i] - g * normals[k][i] / nn : z[i];
            corr[k][i] = z[i] - yi;
            moved += (yi - y[i]) * (yi - y[i]);
            y[i] = yi;
          }
        }
        if (moved < 1e-28) break;
      }
      std::copy(y.begin(), y.end(), out);
      double s = 0.0;
      for (size_t i = 0; i < d; ++i) s += (x[i] - out[i]) * (x[i] - out[i]);
      return std::sqrt(s);
    }
  }
  return 0.0;
}

std::string Domain::describe() const {
  std::ostringstream os;
  switch (kind) {
    case DomainKind::full_space: os << "R^d"; break;
    case DomainKind::punctured_origin: os << "R^d \\ {0}"; break;
    case DomainKind::ball:
      os << "closure(ball(r=" << radius << "))";
      break;
    case DomainKind::half_space:
      os << "half_space(x[" << axis << "] " << (side > 0 ? "<= " : ">= ") << level << ")";
      break;
    case DomainKind::polytope: os << "polytope(" << normals.size() << " faces)"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------- rho

double rho_radial(const RhoSpec& rho, double r) {
  switch (rho.kind) {
    case RhoKind::constant:
      return rho.c;
    case RhoKind::radial_power:
      if (r == 0.0) return rho.alpha > 0.0 ? 0.0 : (rho.alpha < 0.0 ? kInf : 1.0);
      return std::pow(r, rho.alpha);
    case RhoKind::log_modified: {
      if (r == 0.0) return rho.alpha > 0.0 ? 0.0 : kInf;
      if (r == 1.0) return 0.0;
      const double lg = std::fabs(std::log(r));
      if (r < 1.0) return std::pow(r, rho.alpha) * std::pow(lg, rho.alpha_log);
      return std::pow(r, rho.beta_pow) * std::pow(lg, rho.beta_log);
    }
  }
  return 1.0;
}

double drift_coef(const RhoSpec& rho, double r) {
  double coef = 0.0;
  switch (rho.kind) {
    case RhoKind::constant:
      return 0.0;
    case RhoKind::radial_power:
      if (r == 0.0) return 0.0;
      coef = rho.alpha / (2.0 * r * r);
      break;
    case RhoKind::log_modified: {
      if (r == 0.0) return 0.0;
      // ∇ρ/ρ = (a + a_log/log r)·x/‖x‖² on each side of the unit sphere;
      // log r -> 0 there, the clamp keeps the tamed step finite
      const double lg = std::log(r);
      const double a = (r < 1.0) ? rho.alpha : rho.beta_pow;
      const double al = (r < 1.0) ? rho.alpha_log : rho.beta_log;
      coef = (lg != 0.0) ? (a + al / lg) / (2.0 * r * r)
                         : std::copysign(kInf, al);
      break;
    }
  }
  const double cap = kCoefCap / std::max(r * r, 1e-300);
  if (!std::isfinite(coef)) coef = std::copysign(cap, coef);
  return std::clamp(coef, -cap, cap);
}

// ---------------------------------------------------------------- phi

namespace {
// piecewise value with half-open cells [level_{k-1}, level_k)
double piecewise(const std::vector<double>& levels, const std::vector<double>& values,
                 double u) {
  const size_t idx =
      size_t(std::upper_bound(levels.begin(), levels.end(), u) - levels.begin());
  return values[idx];
}
}  // namespace

double phi_value(const PhiSpec& phi, const double* x, size_t d) {
  switch (phi.kind) {
    case PhiKind::uniform:
      return phi.c;
    case PhiKind::annuli: {
      const double r = norm(x, d);
      if (r < phi.m0) return piecewise(phi.inner_levels, phi.inner_values, r);
      return piecewise(phi.outer_levels, phi.outer_values, r);
    }
    case PhiKind::slabs: {
      const double u = x[d - 1];
      if (u < 0.0) return piecewise(phi.inner_levels, phi.inner_values, u);
      return piecewise(phi.outer_levels, phi.outer_values, u);
    }
    case PhiKind::lipschitz_domain:
      return phi.domain.contains(x, d) ? (1.0 - phi.beta_out) : phi.beta_out;
  }
  return 1.0;
}

double eval_weight(const WeightSpec& w, const double* x, size_t d) {
  return rho_radial(w.rho, norm(x, d)) * phi_value(w.phi, x, d);
}

void log_drift(const WeightSpec& w, const double* x, double* out) {
  const size_t d = size_t(w.dim);
  const double coef = drift_coef(w.rho, norm(x, d));
  for (size_t i = 0; i < d; ++i) out[i] = coef * x[i];
}

Vec log_drift(const WeightSpec& w, const Vec& x) {
  Vec out(x.size());
  log_drift(w, x.data(), out.data());
  return out;
}

double phi_min(const PhiSpec& phi) {
  switch (phi.kind) {
    case PhiKind::uniform: return phi.c;
    case PhiKind::lipschitz_domain: return std::min(phi.beta_out, 1.0 - phi.beta_out);
    default: {
      double m = kInf;
      for (double v : phi.inner_values) m = std::min(m, v);
      for (double v : phi.outer_values) m = std::min(m, v);
      return m;
    }
  }
}

double phi_max(const PhiSpec& phi) {
  switch (phi.kind) {
    case PhiKind::uniform: return phi.c;
    case PhiKind::lipschitz_domain: return std::max(phi.beta_out, 1.0 - phi.beta_out);
    default: {
      double m = 0.0;
      for (double v : phi.inner_values) m = std::max(m, v);
      for (double v : phi.outer_values) m = std::max(m, v);
      return m;
    }
  }
}

// ---------------------------------------------------------------- interfaces

namespace {
Interface make_iface(InterfaceGeom geom, double level, double lo, double hi) {
  Interface f;
  f.geom = geom;
  f.level = level;
  f.gamma_lo = lo;
  f.gamma_hi = hi;
  f.beta = hi / (hi + lo);
  f.revuz_weight = 0.5 * (lo + hi);
  return f;
}
}  // namespace

InterfaceSet skew_interfaces(const WeightSpec& w, double threshold) {
  std::vector<Interface> all;
  const PhiSpec& p = w.phi;
  switch (p.kind) {
    case PhiKind::uniform:
      break;
    case PhiKind::annuli: {
      for (size_t k = 0; k < p.inner_levels.size(); ++k)
        all.push_back(make_iface(InterfaceGeom::sphere, p.inner_levels[k],
                                 p.inner_values[k], p.inner_values[k + 1]));
      // central sphere at m0: last inner value against first outer value
      all.push_back(make_iface(InterfaceGeom::sphere, p.m0, p.inner_values.back(),
                               p.outer_values.front()));
      for (size_t k = 0; k < p.outer_levels.size(); ++k)
        all.push_back(make_iface(InterfaceGeom::sphere, p.outer_levels[k],
                                 p.outer_values[k], p.outer_values[k + 1]));
      break;
    }
    case PhiKind::slabs: {
      for (size_t k = 0; k < p.inner_levels.size(); ++k)
        all.push_back(make_iface(InterfaceGeom::hyperplane, p.inner_levels[k],
                                 p.inner_values[k], p.inner_values[k + 1]));
      all.push_back(make_iface(InterfaceGeom::hyperplane, 0.0, p.inner_values.back(),
                               p.outer_values.front()));
      for (size_t k = 0; k < p.outer_levels.size(); ++k)
        all.push_back(make_iface(InterfaceGeom::hyperplane, p.outer_levels[k],
                                 p.outer_values[k], p.outer_values[k + 1]));
      break;
    }
    case PhiKind::lipschitz_domain: {
      const double in = 1.0 - p.beta_out, out = p.beta_out;
      const Domain& g = p.domain;
      const bool origin_ball = g.kind == DomainKind::ball &&
                               (g.center.empty() || norm(g.center) == 0.0);
      if (origin_ball) {
        all.push_back(make_iface(InterfaceGeom::sphere, g.radius, in, out));
      } else if (g.kind == DomainKind::half_space && g.axis == w.dim - 1) {
        // hyperplane orthogonal to the last coordinate; "upper" = larger x_d
        const double lo = g.side > 0 ? in : out;
        const double hi = g.side > 0 ? out : in;
        all.push_back(make_iface(InterfaceGeom::hyperplane, g.level, lo, hi));
      } else {
        Interface f = make_iface(InterfaceGeom::domain_boundary, 0.0, in, out);
        f.domain = g;
        all.push_back(f);
      }
      break;
    }
  }
  InterfaceSet set;
  for (const Interface& f : all) {
    if (std::fabs(f.skewness()) >= threshold) {
      set.kept.push_back(f);
    } else {
      ++set.dropped_count;
      set.dropped_skewness += std::fabs(f.skewness());
    }
  }
  return set;
}

// ---------------------------------------------------------------- validation

namespace {
void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("weight spec: " + msg);
}

void check_levels(const std::vector<double>& levels, const std::vector<double>& values,
                  const char* which) {
  require(values.size() == levels.size() + 1,
          std::string(which) + " values must have levels+1 entries");
  for (size_t i = 0; i + 1 < levels.size(); ++i)
    require(levels[i] < levels[i + 1], std::string(which) + " levels must be ascending");
  for (double v : values)
    require(std::isfinite(v) && v > 0.0, std::string(which) + " values must be positive");
}
}  // namespace

void validate(const WeightSpec& w, bool for_simulation) {
  const double d = double(w.dim);
  require(w.dim >= 2, "dimension must be >= 2");

  switch (w.rho.kind) {
    case RhoKind::constant:
      require(std::isfinite(w.rho.c) && w.rho.c > 0.0, "constant rho must be positive");
      break;
    case RhoKind::radial_power:
      require(std::isfinite(w.rho.alpha), "alpha must be finite");
      if (for_simulation)
        require(w.rho.alpha > -d + 1.0 && w.rho.alpha < d,
                "radial power needs alpha in (-d+1, d) for simulation");
      break;
    case RhoKind::log_modified:
      require(w.rho.alpha > -d + 1.0 && w.rho.alpha < d,
              "log-modified needs alpha in (-d+1, d)");
      require(w.rho.beta_pow > -d && w.rho.beta_pow < d,
              "log-modified needs beta in (-d, d)");
      require(w.rho.alpha_log > 0.0 && w.rho.beta_log > 0.0,
              "log-modified needs positive log exponents");
      break;
  }

  switch (w.phi.kind) {
    case PhiKind::uniform:
      require(std::isfinite(w.phi.c) && w.phi.c > 0.0, "uniform phi must be positive");
      break;
    case PhiKind::annuli:
      check_levels(w.phi.inner_levels, w.phi.inner_values, "annuli inner");
      check_levels(w.phi.outer_levels, w.phi.outer_values, "annuli outer");
      require(w.phi.m0 > 0.0, "annuli central radius must be positive");
      if (!w.phi.inner_levels.empty()) {
        require(w.phi.inner_levels.front() > 0.0, "annuli inner radii must be positive");
        require(w.phi.inner_levels.back() < w.phi.m0, "annuli inner radii must be < m0");
      }
      if (!w.phi.outer_levels.empty())
        require(w.phi.outer_levels.front() > w.phi.m0, "annuli outer radii must be > m0");
      break;
    case PhiKind::slabs:
      check_levels(w.phi.inner_levels, w.phi.inner_values, "slab lower");
      check_levels(w.phi.outer_levels, w.phi.outer_values, "slab upper");
      if (!w.phi.inner_levels.empty())
        require(w.phi.inner_levels.back() < 0.0, "slab lower levels must be negative");
      if (!w.phi.outer_levels.empty())
        require(w.phi.outer_levels.front() > 0.0, "slab upper levels must be positive");
      break;
    case PhiKind::lipschitz_domain:
      require(w.phi.beta_out > 0.0 && w.phi.beta_out < 1.0, "beta must be in (0,1)");
      require(w.phi.domain.kind == DomainKind::ball ||
                  w.phi.domain.kind == DomainKind::half_space ||
                  w.phi.domain.kind == DomainKind::polytope,
              "lipschitz phi needs a ball/half-space/polytope domain");
      if (w.phi.domain.kind == DomainKind::ball)
        require(w.phi.domain.radius > 0.0, "ball radius must be positive");
      break;
  }
}

// ---------------------------------------------------------------- state space

StateSpace state_space(const WeightSpec& w, Mode mode, const Domain* reflect_domain) {
  StateSpace s;
  const double d = double(w.dim);

  if (mode == Mode::reflected) {
    if (!reflect_domain)
      throw std::invalid_argument("state_space: reflected mode needs a domain");
    s.domain = *reflect_domain;
    s.description = "closure(" + reflect_domain->describe() + ")";
    if (w.rho.kind != RhoKind::constant)
      s.description += " minus the zero set of rho";
    return s;
  }

  if (mode == Mode::killed) {
    switch (w.rho.kind) {
      case RhoKind::constant:
        s.domain.kind = DomainKind::full_space;
        s.description = "R^d (rho never vanishes; killing inactive)";
        break;
      case RhoKind::radial_power:
        if (w.rho.alpha == 0.0) {
          s.domain.kind = DomainKind::full_space;
          s.description = "R^d";
        } else {
          s.domain.kind = DomainKind::punctured_origin;
          s.description = "{rho > 0} = R^d \\ {0}";
        }
        break;
      case RhoKind::log_modified:
        s.domain.kind = DomainKind::punctured_origin;
        s.description =
            "{rho > 0} = R^d minus {0} and the unit sphere (rho vanishes on ‖x‖=1)";
        break;
    }
    return s;
  }

  // free motion
  switch (w.rho.kind) {
    case RhoKind::constant:
      s.domain.kind = DomainKind::full_space;
      s.description = "R^d";
      return s;
    case RhoKind::log_modified:
      s.domain.kind = DomainKind::full_space;
      s.description = "R^d (drift singular at 0 and on the unit sphere; tamed steps)";
      return s;
    case RhoKind::radial_power: {
      const double a = w.rho.alpha;
      if (a <= -d + 1.0 || a >= d)
        throw std::invalid_argument(
            "state_space: radial power alpha outside the supported range (-d+1, d)");
      const bool with_ifaces = !skew_interfaces(w).kept.empty();
      const double split = with_ifaces ? 1.0 : 2.0;
      if (a < split) {
        s.domain.kind = DomainKind::full_space;
        s.description = with_ifaces ? "R^d (alpha in (-d+1,1), interfaces present)"
                                    : "R^d (alpha in (-d+1,2), no interfaces)";
      } else {
        s.domain.kind = DomainKind::punctured_origin;
        s.description = with_ifaces ? "R^d \\ {0} (alpha in [1,d), interfaces present)"
                                    : "R^d \\ {0} (alpha in [2,d), no interfaces)";
      }
      return s;
    }
  }
  return s;
}

}  // namespace skewflow
