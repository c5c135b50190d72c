#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "skewflow/quadrature.hpp"
#include "skewflow/rng.hpp"
#include "skewflow/vec.hpp"
#include "skewflow/weights.hpp"

using namespace skewflow;

namespace {

WeightSpec power_weight(double alpha, int dim = 3) {
  WeightSpec w;
  w.dim = dim;
  w.rho.kind = RhoKind::radial_power;
  w.rho.alpha = alpha;
  return w;
}

WeightSpec slab_weight(double lo, double hi) {
  WeightSpec w;
  w.dim = 3;
  w.phi.kind = PhiKind::slabs;
  w.phi.inner_values = {lo};
  w.phi.outer_values = {hi};
  return w;
}

// centred finite difference of (1/2) log psi along each axis
Vec fd_log_drift(const WeightSpec& w, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (std::log(eval_weight(w, xp.data(), xp.size())) -
            std::log(eval_weight(w, xm.data(), xm.size()))) /
           (4.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("radial power density and drift coefficient") {
  const WeightSpec w = power_weight(1.0);
  CHECK(rho_radial(w.rho, 2.0) == doctest::Approx(2.0));
  // b(x) = alpha x / (2 r^2): coefficient 1/(2*4) = 1/8 at r=2
  CHECK(drift_coef(w.rho, 2.0) == doctest::Approx(0.125).epsilon(1e-14));
  const Vec g = log_drift(w, {2.0, 0.0, 0.0});
  CHECK(g[0] == doctest::Approx(0.25).epsilon(1e-12));  // alpha/(2r) along e_1
  CHECK(g[1] == 0.0);
}

TEST_CASE("analytic log-drift matches finite differences") {
  WeightSpec w = power_weight(1.5);
  w.phi.kind = PhiKind::uniform;
  w.phi.c = 2.0;

  WeightSpec wl;
  wl.dim = 3;
  wl.rho.kind = RhoKind::log_modified;
  wl.rho.alpha = 0.5;
  wl.rho.alpha_log = 1.0;
  wl.rho.beta_pow = -1.0;
  wl.rho.beta_log = 1.0;

  CounterRng rng(31337, 0);
  for (int trial = 0; trial < 10; ++trial) {
    Vec x(3);
    for (double& c : x) c = 0.4 + rng.next_uniform() * 1.2;  // keep away from r=0,1
    for (const WeightSpec* ws : {&w, &wl}) {
      const Vec a = log_drift(*ws, x);
      const Vec f = fd_log_drift(*ws, x);
      for (size_t i = 0; i < 3; ++i)
        CHECK(a[i] == doctest::Approx(f[i]).epsilon(1e-5));
    }
  }
}

TEST_CASE("log-modified drift cancels at r = e for opposing exponents") {
  // with rho ~ r^{-1} (log r)^{+1} outside B_1, d(log rho)/dr = -1/r + 1/(r log r)
  // vanishes exactly at log r = 1
  WeightSpec w;
  w.dim = 3;
  w.rho.kind = RhoKind::log_modified;
  w.rho.alpha = 0.5;
  w.rho.beta_pow = -1.0;
  w.rho.beta_log = 1.0;
  const double e = std::exp(1.0);
  const Vec g = log_drift(w, {e, 0.0, 0.0});
  CHECK(std::fabs(g[0]) < 1e-12);
  CHECK(std::fabs(g[1]) < 1e-12);
  CHECK(std::fabs(g[2]) < 1e-12);
}

TEST_CASE("slab phi: half-open cells and the implicit level-0 interface") {
  const WeightSpec w = slab_weight(0.5, 1.5);
  const double below[3] = {0.0, 0.0, -0.1};
  const double at[3] = {0.0, 0.0, 0.0};
  const double above[3] = {0.0, 0.0, 0.1};
  CHECK(phi_value(w.phi, below, 3) == doctest::Approx(0.5));
  CHECK(phi_value(w.phi, at, 3) == doctest::Approx(1.5));  // u >= 0 is the upper cell
  CHECK(phi_value(w.phi, above, 3) == doctest::Approx(1.5));
  CHECK(eval_weight(w, above, 3) == doctest::Approx(1.5));

  const InterfaceSet set = skew_interfaces(w);
  REQUIRE(set.kept.size() == 1);
  CHECK(set.dropped_count == 0);
  const Interface& f = set.kept[0];
  CHECK(f.geom == InterfaceGeom::hyperplane);
  CHECK(f.level == 0.0);
  CHECK(f.beta == doctest::Approx(0.75).epsilon(1e-15));  // 1.5/(0.5+1.5) exactly
  CHECK(f.revuz_weight == doctest::Approx(1.0));
}

TEST_CASE("sub-threshold interfaces are dropped, strong ones kept") {
  WeightSpec w;
  w.dim = 3;
  w.phi.kind = PhiKind::slabs;
  w.phi.inner_values = {1.0};
  w.phi.outer_levels = {0.0078125, 0.015625, 0.03125, 0.0625, 0.125, 0.25, 0.5, 1.0};
  w.phi.outer_values = {1.00006103515625, 1.000244140625, 1.0009765625, 1.00390625,
                        1.015625, 1.0625, 1.25, 2.0, 1.0};
  const InterfaceSet set = skew_interfaces(w, 1e-3);
  CHECK(set.kept.size() == 6);    // levels 1/32 .. 1 survive
  CHECK(set.dropped_count == 3);  // 1/128, 1/64 and the implicit level 0
  for (const Interface& f : set.kept) CHECK(f.level >= 0.03125);
}

TEST_CASE("annuli and lipschitz-ball phi produce sphere interfaces") {
  WeightSpec w;
  w.dim = 3;
  w.phi.kind = PhiKind::annuli;
  w.phi.m0 = 1.0;
  w.phi.inner_values = {2.0};
  w.phi.outer_values = {1.0};
  const InterfaceSet set = skew_interfaces(w);
  REQUIRE(set.kept.size() == 1);
  CHECK(set.kept[0].geom == InterfaceGeom::sphere);
  CHECK(set.kept[0].level == doctest::Approx(1.0));
  CHECK(set.kept[0].beta == doctest::Approx(1.0 / 3.0));  // outward weight 1 vs 2

  WeightSpec wl;
  wl.dim = 3;
  wl.phi.kind = PhiKind::lipschitz_domain;
  wl.phi.beta_out = 0.3;
  wl.phi.domain.kind = DomainKind::ball;
  wl.phi.domain.center = {0.0, 0.0, 0.0};
  wl.phi.domain.radius = 1.0;
  const InterfaceSet sl = skew_interfaces(wl);
  REQUIRE(sl.kept.size() == 1);
  CHECK(sl.kept[0].geom == InterfaceGeom::sphere);
  CHECK(sl.kept[0].beta == doctest::Approx(0.3));
}

TEST_CASE("validation separates diagnostic and simulation ranges") {
  WeightSpec w = power_weight(3.5);
  CHECK_NOTHROW(validate(w, false));                          // fine as a diagnostic
  CHECK_THROWS_AS(validate(w, true), std::invalid_argument);  // not simulable

  WeightSpec bad = slab_weight(1.0, 2.0);
  bad.phi.outer_levels = {-0.5};  // upper levels must be positive
  bad.phi.outer_values = {2.0, 3.0};
  CHECK_THROWS_AS(validate(bad, false), std::invalid_argument);
}

TEST_CASE("state space: strong inward drift excludes the origin") {
  const StateSpace full = state_space(WeightSpec{}, Mode::free_motion, nullptr);
  const double origin[3] = {0.0, 0.0, 0.0};
  CHECK(full.domain.contains(origin, 3));

  // alpha = 1 behaves like a Bessel(4) start: 0 is still a legal start point
  const StateSpace mild = state_space(power_weight(1.0), Mode::free_motion, nullptr);
  CHECK(mild.domain.contains(origin, 3));

  const StateSpace punct = state_space(power_weight(2.5), Mode::free_motion, nullptr);
  const double x1[3] = {1.0, 0.0, 0.0};
  CHECK(punct.domain.contains(x1, 3));
  CHECK_FALSE(punct.domain.contains(origin, 3));

  // killing is armed wherever rho can vanish, so the zero set is excluded
  const StateSpace killed = state_space(power_weight(1.0), Mode::killed, nullptr);
  CHECK_FALSE(killed.domain.contains(origin, 3));
}

TEST_CASE("domain projection: ball, half-space, box polytope") {
  Domain ball;
  ball.kind = DomainKind::ball;
  ball.center = {0.0, 0.0, 0.0};
  ball.radius = 1.0;
  const double outside[3] = {2.0, 0.0, 0.0};
  double proj[3];
  CHECK(ball.project(outside, proj, 3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(proj[0] == doctest::Approx(1.0));
  CHECK(ball.contains(proj, 3));

  Domain half;  // side > 0 keeps x[axis] <= level
  half.kind = DomainKind::half_space;
  half.axis = 2;
  half.level = 0.0;
  half.side = -1;
  const double below[3] = {0.3, -0.2, -0.7};
  CHECK_FALSE(half.contains(below, 3));
  CHECK(half.project(below, proj, 3) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(proj[2] == doctest::Approx(0.0));

  Domain box;
  box.kind = DomainKind::polytope;
  box.normals = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0},
                 {0.0, -1.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}};
  box.offsets = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  const double corner[3] = {1.5, 1.5, 0.0};
  const double dcorner = box.project(corner, proj, 3);
  CHECK(dcorner == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  CHECK(proj[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(proj[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ball mass falls back to monte carlo off the radial fast paths") {
  WeightSpec w = power_weight(1.0, 4);  // d=4 has no chord reduction
  const MassResult m = ball_mass(w, {0.0, 0.0, 0.0, 0.0}, 1.0);
  // centred radial integral is still exact in d=4
  CHECK(m.value == doctest::Approx(sphere_area(4) / 5.0).epsilon(1e-9));

  const MassResult off = ball_mass(w, {2.0, 0.0, 0.0, 0.0}, 1.0, 1, 200000);
  CHECK(off.used_mc);
  // cap-area oracle: 2*pi*int_1^3 s^4 (th - sin th cos th) ds, cos th = (s^2+3)/(4s)
  CHECK(off.value == doctest::Approx(10.4815727805).epsilon(0.01));
}
