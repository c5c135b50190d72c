#pragma once
// Local-time estimators at a level set, from a materialized Path or streamed
// step-by-step inside a batch observer.
//
//   Tanaka      ℓ̂ = |u_T−a| − |u_0−a| − Σ sgn(u_k−a)(u_{k+1}−u_k),  sgn(0)=0
//               (unbiased for the driftless chain: the sum is a martingale)
//   occupation  ℓ̂ = (1/2ε) Σ dt·1{|u_k−a| ≤ ε}, pre-state rule; needs ε ≥ 2√dt
//               or the band is too thin for the chain to resolve
//   discounted  Σ e^{−t_k} Δℓ_k approximates ∫ e^{−t} dℓ_t; the reported tail
//               bound extrapolates the ledger's average growth rate past T
#include <cmath>
#include <cstddef>

#include "skewflow/sim.hpp"
#include "skewflow/stats.hpp"

namespace skewflow {

struct TanakaAccum {
  double level = 0.0;
  size_t axis = 0;
  void observe(double u_pre, double u_post) {
    if (!started_) {
      first_ = u_pre;
      started_ = true;
    }
    const double s = u_pre > level ? 1.0 : (u_pre < level ? -1.0 : 0.0);
    sgn_int_.add(s * (u_post - u_pre));
    last_ = u_post;
  }
  void step(const StepView& v) { observe(v.pre[axis], v.post[axis]); }
  double value() const {
    if (!started_) return 0.0;
    return std::fabs(last_ - level) - std::fabs(first_ - level) - sgn_int_.value();
  }

 private:
  bool started_ = false;
  double first_ = 0.0, last_ = 0.0;
  KahanSum sgn_int_;
};

struct OccupationAccum {
  double level = 0.0, eps = 0.0, dt = 0.0;
  size_t axis = 0;
  void observe(double u_pre) {
    if (std::fabs(u_pre - level) <= eps) ++hits_;
  }
  void step(const StepView& v) { observe(v.pre[axis]); }
  double value() const { return double(hits_) * dt / (2.0 * eps); }

 private:
  long long hits_ = 0;
};

struct DiscountAccum {
  void observe(double t_pre, double dl) {
    if (dl != 0.0) sum_.add(std::exp(-t_pre) * dl);
    total_ += dl;
    t_end_ = t_pre;
  }
  double value() const { return sum_.value(); }
  double total() const { return total_; }
  // ∫_T^∞ e^{−t}·(average rate) dt, assuming the ledger keeps its mean pace
  double tail_bound() const {
    return t_end_ > 0.0 ? std::exp(-t_end_) * total_ / t_end_ : 0.0;
  }

 private:
  KahanSum sum_;
  double total_ = 0.0, t_end_ = 0.0;
};

// Tanaka–Meyer estimate of symmetric local time at `level` on coordinate
// `axis` (-1 → last). May come out slightly negative path-by-path.
double tanaka_local_time(const Path& p, double level, int axis = -1);

// band-occupation estimate; throws if eps < 2√dt
double occupation_local_time(const Path& p, double level, double eps, int axis = -1);

// band occupation of the radial coordinate at `radius`
double sphere_local_time(const Path& p, double radius, double eps);

struct DiscountedLedger {
  double value = 0.0;
  double tail_bound = 0.0;
};

// Σ e^{−t} dℓ over a ledger slot of the path
DiscountedLedger revuz_discounted(const Path& p, size_t slot);

}  // namespace skewflow
