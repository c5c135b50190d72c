#pragma once
// Riesz potentials V_η g(x) = ∫ ‖x−y‖^{η−d} g(y) dy for radial densities,
// resolvent-kernel envelopes Φ/Ψ, Monte-Carlo resolvent potentials R_1, and
// the bounded-by-continuous smoothness probe.
#include <functional>
#include <string>
#include <vector>

#include "skewflow/sim.hpp"
#include "skewflow/vec.hpp"
#include "skewflow/weights.hpp"

namespace skewflow {

struct PotentialEstimate {
  double value = 0.0;
  double error = 0.0;  // quadrature abs-error bound or MC standard error
  bool converged = true;
  std::string kind;  // "riesz" | "resolvent_mc" | "envelope"
};

// density g(‖y − center‖), supported in ‖y − center‖ ≤ support_radius
struct RadialDensity {
  Vec center;
  std::function<double(double)> g;
  double support_radius = 1.0;
  std::vector<double> breakpoints;  // radii where g is non-smooth
};

// d=3: exact reduction to a 1-D quadrature (chord integral about the center);
// other d: plain Monte-Carlo over the support ball with `mc_budget` samples.
// η must be positive (kernel integrable near the evaluation point).
PotentialEstimate riesz_potential(const RadialDensity& g, double eta, const Vec& x,
                                  int dim = 3, uint64_t mc_budget = 400000);

struct HolderFit {
  double exponent = 0.0;  // +inf sentinel when the function is flat on the grid
  double log_constant = 0.0;
  double r2 = 0.0;
  size_t pairs = 0;
  bool degenerate = false;
  bool pass = false;  // exponent >= target − 0.1 (or degenerate)
};

// least-squares slope of log|fn(x)−fn(y)| vs log‖x−y‖ over nearest-neighbour
// pairs of the grid
HolderFit holder_probe(const std::function<double(const Vec&)>& fn,
                       const std::vector<Vec>& grid, double target_exponent);

struct EnvelopePair {
  double phi = 0.0;  // Φ = ‖x−y‖^{−(α+d−2)}
  double psi = 0.0;  // Ψ = ‖x−y‖^{−(d−2)} ‖y‖^{−α}
  double lower = 0.0;  // Φ + Ψ·1{α ∈ [0,d)}
  double upper = 0.0;  // Φ + Ψ·1{α ∈ (−d,0)}
};

// x=y or y=0 give +inf sentinels
EnvelopePair resolvent_envelope(double alpha, int d, const Vec& x, const Vec& y);

// R_1 f(x) = E_x ∫_0^T e^{−t} f(X_t) dt (midpoint discount), killed paths
// contribute nothing past their lifetime
PotentialEstimate mc_resolvent_density(const WeightSpec& w, const SimConfig& cfg,
                                       const Vec& x,
                                       const std::function<double(const Vec&)>& f,
                                       size_t n_paths, uint64_t seed, int workers);

// R_1 of the measure rw·ρσ living on a hyperplane or sphere interface, via a
// smoothing kernel at the surface: Σ e^{−t} K_h(dist)·(rw·ρ/ψ)(X)·corr·dt with
// the sphere-area correction (a/r)^{d−1}. Independent of the ledger route.
PotentialEstimate mc_resolvent_measure(const WeightSpec& w, const SimConfig& cfg,
                                       const Vec& x, const Interface& iface,
                                       double kernel_h, size_t n_paths,
                                       uint64_t seed, int workers);

// time-integrated KDE estimate of the resolvent kernel r_1(x, y_j) w.r.t. m
// (3-D Gaussian kernel, value divided by ψ(y_j))
std::vector<PotentialEstimate> mc_resolvent_kernel(const WeightSpec& w,
                                                   const SimConfig& cfg, const Vec& x,
                                                   const std::vector<Vec>& ys,
                                                   double bandwidth, size_t n_paths,
                                                   uint64_t seed, int workers);

struct S00Report {
  std::vector<Vec> grid;
  std::vector<double> potential;  // MC resolvent of the measure/density on G
  std::vector<double> bound;      // candidate continuous majorant values
  double fitted_c = 0.0;          // smallest c with potential ≤ c·bound
  HolderFit continuity;           // probe of the majorant on the grid
  bool pass = false;
  std::string note;
};

// checks that the resolvent potential of a finite measure on G is dominated by
// (a fitted multiple of) a continuous candidate bound on a grid
S00Report s00_check(const std::vector<Vec>& grid, const std::vector<double>& potential,
                    const std::function<double(const Vec&)>& candidate_bound,
                    double tolerance = 0.05);

}  // namespace skewflow
