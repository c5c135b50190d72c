#pragma once
// Weight model ψ = ρ·φ.
//
// ρ is the absolutely-continuous factor (constant, radial power ‖x‖^α, or a
// log-modified radial power); its logarithmic gradient ∇ρ/2ρ is the drift of
// the distorted Brownian motion. φ is piecewise constant (uniform, concentric
// annuli, two-sided slabs orthogonal to the last coordinate, or a two-valued
// Lipschitz-domain indicator); its jump set carries the skew interfaces with
// β = φ_hi/(φ_hi + φ_lo) — the probability of continuing on the heavier side.
#include <cstdint>
#include <string>
#include <vector>

#include "skewflow/vec.hpp"

namespace skewflow {

enum class Mode { free_motion, killed, reflected };

enum class RhoKind { constant, radial_power, log_modified };

struct RhoSpec {
  RhoKind kind = RhoKind::constant;
  double c = 1.0;          // constant value
  double alpha = 0.0;      // radial power; log_modified power inside B_1
  double alpha_log = 1.0;  // log_modified: |log r| exponent inside B_1 (> 0)
  double beta_pow = 0.0;   // log_modified: power outside B_1
  double beta_log = 1.0;   // log_modified: |log r| exponent outside B_1 (> 0)
};

enum class DomainKind { full_space, punctured_origin, ball, half_space, polytope };

struct Domain {
  DomainKind kind = DomainKind::full_space;
  Vec center;             // ball
  double radius = 1.0;    // ball
  int axis = 0;           // half_space: {x : side*(x[axis] - level) < 0}
  double level = 0.0;
  int side = 1;           // +1: inside is x[axis] < level; -1: inside is x[axis] > level
  std::vector<Vec> normals;  // polytope: {x : n_i·x <= b_i}
  std::vector<double> offsets;

  bool contains(const double* x, size_t d) const;
  bool contains(const Vec& x) const { return contains(x.data(), x.size()); }
  // nearest point of the closure (ball/half_space/polytope); returns distance moved
  double project(const double* x, double* out, size_t d) const;
  std::string describe() const;
};

enum class PhiKind { uniform, annuli, lipschitz_domain, slabs };

struct PhiSpec {
  PhiKind kind = PhiKind::uniform;
  double c = 1.0;  // uniform value

  // annuli: jump radii (ascending); inner in (0, m0), outer in (m0, inf).
  //   inner_values covers [0,l_0),(l_0,l_1),...,(l_last,m0): size = inner_levels+1
  //   outer_values covers (m0,r_0),...,(r_last,inf):          size = outer_levels+1
  // slabs: same arrays read as last-coordinate levels; inner ascending < 0
  //   covering (-inf,l_0),...,(l_last,0); outer ascending > 0 covering (0,r_0),...
  std::vector<double> inner_levels, outer_levels;
  std::vector<double> inner_values, outer_values;
  double m0 = 1.0;  // annuli central radius

  // lipschitz_domain: φ = beta_out on G^c, 1-beta_out on G
  Domain domain;
  double beta_out = 0.5;
};

struct WeightSpec {
  RhoSpec rho;
  PhiSpec phi;
  int dim = 3;
};

enum class InterfaceGeom { hyperplane, sphere, domain_boundary };

struct Interface {
  InterfaceGeom geom = InterfaceGeom::hyperplane;
  double level = 0.0;  // hyperplane: x_d = level; sphere: ‖x‖ = level
  double beta = 0.5;   // probability of the upper/outer side after a crossing
  double gamma_lo = 1.0;  // φ on the lower/inner side
  double gamma_hi = 1.0;  // φ on the upper/outer side
  double revuz_weight = 1.0;  // (γ_lo+γ_hi)/2: density of the Revuz measure vs ρσ
  Domain domain;       // domain_boundary only
  double skewness() const { return 2.0 * beta - 1.0; }
};

struct InterfaceSet {
  std::vector<Interface> kept;
  size_t dropped_count = 0;
  double dropped_skewness = 0.0;  // sum of |2β-1| below threshold
};

double rho_radial(const RhoSpec& rho, double r);
// drift coefficient: b(x) = drift_coef(rho, r) * x (radial kinds)
double drift_coef(const RhoSpec& rho, double r);

double phi_value(const PhiSpec& phi, const double* x, size_t d);
double eval_weight(const WeightSpec& w, const double* x, size_t d);
inline double eval_weight(const WeightSpec& w, const Vec& x) {
  return eval_weight(w, x.data(), x.size());
}

// b = ∇ρ/(2ρ); zero vector at the (measure-zero) singular points
void log_drift(const WeightSpec& w, const double* x, double* out);
Vec log_drift(const WeightSpec& w, const Vec& x);

// Jump interfaces of φ with |2β-1| >= threshold; others reported as dropped.
InterfaceSet skew_interfaces(const WeightSpec& w, double threshold = 1e-3);

// min/max of φ over its pieces
double phi_min(const PhiSpec& phi);
double phi_max(const PhiSpec& phi);

struct StateSpace {
  Domain domain;
  std::string description;
};
// Startable set: full vs punctured space for radial powers (with the interface
// split at α=1 and the interface-free split at α=2), {ρ>0} in killed mode,
// closure(G) in reflected mode.
StateSpace state_space(const WeightSpec& w, Mode mode,
                       const Domain* reflect_domain = nullptr);

// Throws std::invalid_argument on malformed parameters. Simulation usage
// enforces the drift-integrability range (radial power α ∈ (−d+1, d));
// diagnostic usage (A2 sweeps) only requires well-formedness, so that
// out-of-range weights can be probed for A2 failure.
void validate(const WeightSpec& w, bool for_simulation);

// --- mass / A2 diagnostics (quadrature.cpp) ---

struct MassResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = true;
  bool used_mc = false;
};

// ∫_{B_r(c)} ψ^{sign} dx for sign=±1. Radial ψ about the origin: exact
// segment-wise radial integration (origin-centred) or the d=3 chord reduction
// (off-centre); otherwise Monte-Carlo fallback with mc_budget samples.
MassResult ball_mass(const WeightSpec& w, const Vec& center, double radius,
                     int sign = 1, size_t mc_budget = 1000000);

struct A2Entry {
  double radius = 0.0;
  double product = 0.0;  // (avg_B ψ)(avg_B ψ^{-1})
  double avg_w = 0.0, avg_winv = 0.0;
  bool converged = true;
};

struct A2Result {
  std::vector<A2Entry> entries;  // in the given radius order
  double sup_product = 0.0;
  double spread = 1.0;         // max/min product over the family
  double growth_factor = 1.0;  // alias of spread, reported when monotone
  bool monotone = true;        // products monotone in radius
  bool all_converged = true;
};

A2Result a2_estimate(const WeightSpec& w, const Vec& center,
                     const std::vector<double>& radii);

}  // namespace skewflow
