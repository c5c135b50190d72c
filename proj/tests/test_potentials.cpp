#include <doctest.h>

#include <cmath>
#include <vector>

#include "skewflow/potentials.hpp"
#include "skewflow/quadrature.hpp"

using namespace skewflow;

namespace {

RadialDensity unit_indicator() {
  RadialDensity g;
  g.center = {0.0, 0.0, 0.0};
  g.g = [](double) { return 1.0; };
  g.support_radius = 1.0;
  return g;
}

}  // namespace

TEST_CASE("newtonian potential of the unit ball") {
  // V_2(1_{B_1})(x) = 2π(1 − ‖x‖²/3) inside, (4π/3)/‖x‖ outside
  const RadialDensity g = unit_indicator();
  const PotentialEstimate at0 = riesz_potential(g, 2.0, {0.0, 0.0, 0.0});
  CHECK(at0.converged);
  CHECK(at0.value == doctest::Approx(2.0 * kPi).epsilon(1e-10));

  const PotentialEstimate surf = riesz_potential(g, 2.0, {1.0, 0.0, 0.0});
  CHECK(surf.value == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-9));

  const PotentialEstimate out = riesz_potential(g, 2.0, {2.0, 0.0, 0.0});
  CHECK(out.value == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-10));

  // linearity in g
  RadialDensity g2 = unit_indicator();
  g2.g = [](double) { return 2.0; };
  const PotentialEstimate twice = riesz_potential(g2, 2.0, {2.0, 0.0, 0.0});
  CHECK(twice.value == doctest::Approx(2.0 * out.value).epsilon(1e-12));
}

TEST_CASE("riesz exponents away from the newtonian case") {
  const RadialDensity g = unit_indicator();
  // η = d: kernel ≡ 1, the potential is the mass of the ball
  const PotentialEstimate mass = riesz_potential(g, 3.0, {0.4, 0.2, -0.1});
  CHECK(mass.value == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-9));

  // η = 1 at the centre: ∫_{B_1} ‖y‖^{-2} dy = 4π
  const PotentialEstimate e1 = riesz_potential(g, 1.0, {0.0, 0.0, 0.0});
  CHECK(e1.value == doctest::Approx(4.0 * kPi).epsilon(1e-8));

  // η = 1 off-centre: V_1(r e_1) = (2π/r)∫_0^1 s·log((r+s)/|r−s|) ds,
  // which at r = 1/2 evaluates to 4π(3 log 3/8 + 1/2)
  const double oracle = 4.0 * kPi * (3.0 * std::log(3.0) / 8.0 + 0.5);
  const PotentialEstimate e2 = riesz_potential(g, 1.0, {0.5, 0.0, 0.0});
  CHECK(e2.value == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("holder probe recovers power-law moduli") {
  // geometric accumulation towards 0, where the sqrt modulus is visible:
  // neighbour gaps scale with the points, so |√a−√b| ≍ |a−b|^{1/2} exactly
  std::vector<Vec> geo;
  for (int i = 0; i <= 20; ++i) geo.push_back({2.0 * std::pow(0.7, i), 0.0, 0.0});
  // cross-scale pairs mix power-law prefactors, so the fit sits a bit above
  // 1/2; what matters is that it is far from the smooth slope 1
  const HolderFit h = holder_probe(
      [](const Vec& x) { return std::sqrt(norm(x)); }, geo, 0.5);
  CHECK(h.exponent > 0.4);
  CHECK(h.exponent < 0.75);
  CHECK(h.pass);

  // uniformly spaced grids are fine too (pairs are drawn at several ranks)
  std::vector<Vec> grid;
  for (int i = 0; i <= 24; ++i) grid.push_back({0.05 + 0.08 * i, 0.0, 0.0});
  const HolderFit lin = holder_probe([](const Vec& x) { return norm(x); }, grid, 1.0);
  CHECK(lin.exponent == doctest::Approx(1.0).epsilon(0.05));

  const HolderFit flat = holder_probe([](const Vec&) { return 3.0; }, grid, 1.0);
  CHECK(flat.degenerate);
  CHECK(flat.pass);

  // too-steep target fails
  const HolderFit steep = holder_probe(
      [](const Vec& x) { return std::sqrt(norm(x)); }, geo, 1.0);
  CHECK_FALSE(steep.pass);
}

TEST_CASE("envelope pair closed forms") {
  const Vec x = {1.0, 0.0, 0.0}, y = {1.0, 1.0, 0.0};
  // α = 0: Φ = Ψ = ‖x−y‖^{-1}; only the lower branch keeps Ψ at the boundary
  const EnvelopePair e0 = resolvent_envelope(0.0, 3, x, y);
  CHECK(e0.phi == doctest::Approx(1.0));
  CHECK(e0.psi == doctest::Approx(1.0));
  CHECK(e0.lower == doctest::Approx(2.0));
  CHECK(e0.upper == doctest::Approx(1.0));

  const EnvelopePair e1 = resolvent_envelope(1.0, 3, x, y);
  CHECK(e1.phi == doctest::Approx(1.0));                         // ‖x−y‖^{-2} = 1
  CHECK(e1.psi == doctest::Approx(1.0 / std::sqrt(2.0)));        // ‖x−y‖^{-1}‖y‖^{-1}
  CHECK(e1.lower == doctest::Approx(e1.phi + e1.psi));           // α ∈ [0,d)
  CHECK(e1.upper == doctest::Approx(e1.phi));

  const EnvelopePair en = resolvent_envelope(-1.0, 3, x, y);
  CHECK(en.lower == doctest::Approx(en.phi));
  CHECK(en.upper == doctest::Approx(en.phi + en.psi));

  const EnvelopePair sing = resolvent_envelope(1.0, 3, x, x);
  CHECK(std::isinf(sing.phi));
}

TEST_CASE("resolvent of f = 1 is deterministic and equals 1 - e^{-T}") {
  const WeightSpec w;
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 2.0;
  const PotentialEstimate r1 = mc_resolvent_density(
      w, cfg, {0.0, 0.0, 0.0}, [](const Vec&) { return 1.0; }, 64, 5, 2);
  // midpoint Riemann sum of ∫_0^T e^{-t} dt: O(dt²) bias, zero variance
  CHECK(r1.value == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-5));
  CHECK(r1.error == 0.0);
}

TEST_CASE("resolvent of a hyperplane measure lands near the discounted local time") {
  const WeightSpec w;
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.horizon = 5.0;
  Interface iface;
  iface.geom = InterfaceGeom::hyperplane;
  iface.level = 0.0;
  iface.gamma_lo = 1.0;
  iface.gamma_hi = 1.0;
  iface.beta = 0.5;
  iface.revuz_weight = 1.0;
  // E ∫ e^{-t} dL_t at the start level = 1/√2 for BM
  const PotentialEstimate m = mc_resolvent_measure(w, cfg, {0.0, 0.0, 0.0}, iface,
                                                   0.02, 1000, 33, 2);
  CHECK(m.value > 0.6);
  CHECK(m.value < 0.8);
}

TEST_CASE("s00 domination bookkeeping") {
  std::vector<Vec> grid;
  std::vector<double> pot;
  for (int i = 0; i < 20; ++i) {
    grid.push_back({0.1 * (i + 1), 0.0, 0.0});
    pot.push_back(0.5 / (0.1 * (i + 1)));
  }
  auto bound = [](const Vec& x) { return 1.0 / norm(x); };
  const S00Report ok = s00_check(grid, pot, bound);
  CHECK(ok.pass);
  CHECK(ok.fitted_c == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ok.continuity.pass);  // smooth majorant clears the holder probe

  std::vector<double> bad = pot;
  bad[3] = 1e6;  // a spike no multiple of the bound explains alongside the rest
  const S00Report nope = s00_check(grid, bad, bound, 1e-6);
  CHECK(nope.fitted_c > 1e4);
}
