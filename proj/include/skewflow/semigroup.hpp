#pragma once
// Monte-Carlo semigroup estimation P_t f(x) = E_x[f(X_t); t < ζ] and the
// numeric checks built on it: Feller behaviour, m-symmetry of the kernel,
// the Gaussian heat-kernel upper bound, the Nash inequality on balls, and
// the radial second-moment identity E‖X_t‖² = ‖x0‖² + (d+α)t.
#include <functional>
#include <string>
#include <vector>

#include "skewflow/sim.hpp"
#include "skewflow/vec.hpp"
#include "skewflow/weights.hpp"

namespace skewflow {

// smooth mollifier bump: height·exp(1 − 1/(1−s²)), s = ‖x−center‖/radius
struct Bump {
  Vec center;
  double radius = 1.0;
  double height = 1.0;
  double operator()(const Vec& x) const {
    double q = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - center[i];
      q += d * d;
    }
    const double s2 = q / (radius * radius);
    if (s2 >= 1.0) return 0.0;
    return height * std::exp(1.0 - 1.0 / (1.0 - s2));
  }
};

struct SemigroupEstimate {
  double value = 0.0;
  double se = 0.0;
  size_t n_paths = 0, n_killed = 0, n_diverged = 0;
};

// killed/diverged paths contribute f(Δ) = 0 (sub-Markovian convention);
// cfg.horizon is overridden by t
SemigroupEstimate mc_semigroup(const WeightSpec& w, SimConfig cfg, const Vec& x,
                               double t, const std::function<double(const Vec&)>& f,
                               size_t n_paths, uint64_t seed, int workers);

// same, path i starting from starts[i] (used for the two-stage semigroup check)
SemigroupEstimate mc_semigroup_from(const WeightSpec& w, SimConfig cfg,
                                    const std::vector<Vec>& starts, double t,
                                    const std::function<double(const Vec&)>& f,
                                    uint64_t seed, int workers);

// collects X_t endpoints (status recorded per path)
struct EndpointCloud {
  std::vector<double> states;  // n × dim, killed/diverged rows are NaN
  std::vector<PathStatus> status;
  size_t dim = 0;
  size_t alive() const;
};
EndpointCloud mc_endpoints(const WeightSpec& w, SimConfig cfg, const Vec& x, double t,
                           size_t n_paths, uint64_t seed, int workers);

struct FellerRow {
  Vec x;
  double t = 0.0, gap = 0.0, se = 0.0;  // gap = |P_t f(x) − f(x)|
};
struct FellerReport {
  std::vector<FellerRow> rows;
  bool trend_ok = false;   // gap shrinks as t ↓ at every grid point
  double far_value = 0.0;  // P_t f at the far point
  double far_se = 0.0;
  bool far_ok = false;
  bool pass = false;
};

// ts must be given in decreasing order; dt is scaled as min(cfg.dt, t/100)
FellerReport feller_check(const WeightSpec& w, const SimConfig& cfg, const Bump& f,
                          const std::vector<Vec>& grid, const std::vector<double>& ts,
                          const Vec& far_x, double far_t, double far_tol,
                          size_t n_paths, uint64_t seed, int workers);

struct SymmetryReport {
  double forward = 0.0, backward = 0.0;  // ∫f P_t g dm vs ∫g P_t f dm (÷ m(box))
  double se_forward = 0.0, se_backward = 0.0, se_diff = 0.0;
  double rel_gap = 0.0;
  size_t n_paths = 0;
  bool pass = false;
};

// start points rejection-sampled from m restricted to [lo,hi]^d; f and g must
// be supported inside the box so both bilinear forms equal the unrestricted
// integrals (the common m(box) factor cancels from the relative gap)
SymmetryReport symmetry_check(const WeightSpec& w, const SimConfig& cfg, const Bump& f,
                              const Bump& g, double t, const Vec& box_lo,
                              const Vec& box_hi, size_t n_paths, uint64_t seed,
                              int workers, double tol = 0.03);

struct KernelEstimate {
  double t = 0.0;
  Vec x;
  std::vector<Vec> grid;
  std::vector<double> density;  // KDE of law(X_t) w.r.t. m, i.e. ÷ ψ(y)
  std::vector<double> se;
  double bandwidth = 0.0;
  double mass = 0.0;      // Riemann sum of KDE·ψ over the grid cells
  double fitted_c = 0.0;  // smallest c: p̂ ≤ c·exp(−‖x−y‖²/((4+ε)t))/m(B_√t(y))
  size_t bulk_points = 0;  // grid points with relative CI below 20%
  bool bound_holds = false;
};

// grid: evaluation lattice with per-point cell volumes (for the mass check);
// bandwidth 0 → Silverman's rule on the endpoint cloud
KernelEstimate heat_kernel_estimate(const WeightSpec& w, const SimConfig& cfg,
                                    const Vec& x, double t,
                                    const std::vector<Vec>& grid,
                                    const std::vector<double>& cell_vol,
                                    size_t n_paths, uint64_t seed, int workers,
                                    double eps_bound = 1.0, double bandwidth = 0.0);

struct NashRow {
  std::string fn;
  double l1 = 0.0, l2sq = 0.0, energy = 0.0;
  double lhs = 0.0, bracket = 0.0;  // ‖f‖₂^{2+4/ν} vs [ℰ+‖f‖₂²]‖f‖₁^{4/ν}
  double c_required = 0.0;
};
struct NashReport {
  std::vector<NashRow> rows;
  double exponent = 0.0;  // ν = d (d ≥ 3) or d+δ (d = 2)
  double fitted_c = 0.0;
  bool pass = false;
};

// quadrature of ‖f‖₁, ‖f‖₂², ℰ(f,f) = ½∫‖∇f‖² dm over B_R(0) for a built-in
// family of radial bumps; requires a radial weight
NashReport nash_probe(const WeightSpec& w, double ball_radius, double delta = 0.5);

struct MomentRow {
  double t = 0.0, target = 0.0, estimate = 0.0, se = 0.0;
  bool pass = false;
};
struct MomentReport {
  std::vector<MomentRow> rows;
  bool pass = false;
};

// E‖X_t‖² = ‖x0‖² + (d+α)t from the generator identity (½Δ + b·∇)‖x‖² = d+α
MomentReport bessel_moment_check(double alpha, int d, const Vec& x0,
                                 const std::vector<double>& ts, double dt,
                                 size_t n_paths, uint64_t seed, int workers,
                                 double tol = 0.02);

}  // namespace skewflow
