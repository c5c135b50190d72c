#include <doctest.h>

#include <cmath>

#include "skewflow/quadrature.hpp"
#include "skewflow/weights.hpp"

using namespace skewflow;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  // n-point rule is exact through degree 2n-1
  const double v = gl_integrate([](double x) { return x * x * x * x * x * x * x; }, 0.0, 1.0, 16);
  CHECK(v == doctest::Approx(0.125).epsilon(1e-14));
  const double w = gl_integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 24);
  CHECK(w == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature: smooth, kinked, and endpoint-singular") {
  const QuadResult smooth = integrate_adaptive([](double x) { return std::cos(x); }, 0.0, 2.0);
  CHECK(smooth.converged);
  CHECK(smooth.value == doctest::Approx(std::sin(2.0)).epsilon(1e-12));

  const QuadResult kink = integrate_adaptive([](double x) { return std::fabs(x - 0.5); },
                                             0.0, 1.0, {0.5});
  CHECK(kink.converged);
  CHECK(kink.value == doctest::Approx(0.25).epsilon(1e-12));

  // integrable endpoint singularity: \int_0^1 x^{-1/2} = 2
  const QuadResult sing = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); },
                                             0.0, 1.0);
  CHECK(sing.value == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("sphere area and ball volume") {
  CHECK(sphere_area(3) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(ball_volume(3, 2.0) == doctest::Approx(32.0 * kPi / 3.0).epsilon(1e-14));
  CHECK(ball_volume(2, 1.0) == doctest::Approx(kPi).epsilon(1e-14));
}

TEST_CASE("ball mass of radial weights: closed forms") {
  WeightSpec w;
  w.dim = 3;
  w.rho.kind = RhoKind::radial_power;
  w.rho.alpha = 1.0;

  // centred: \int_{B_r} |x| dx = pi r^4
  const MassResult m1 = ball_mass(w, {0.0, 0.0, 0.0}, 1.0);
  CHECK(m1.converged);
  CHECK(m1.value == doctest::Approx(kPi).epsilon(1e-10));
  const MassResult m2 = ball_mass(w, {0.0, 0.0, 0.0}, 2.0);
  CHECK(m2.value / m1.value == doctest::Approx(16.0).epsilon(1e-10));  // 2^{d+1}

  // off-centre chord reduction: \int_{B_1(2e_1)} |y| dy = 14 pi / 5
  // (hand integral: (pi/a)\int u^2 (R^2-(a-u)^2) du over [1,3], a=2, R=1)
  const MassResult m3 = ball_mass(w, {2.0, 0.0, 0.0}, 1.0);
  CHECK(m3.converged);
  CHECK(m3.value == doctest::Approx(14.0 * kPi / 5.0).epsilon(1e-9));

  // inverse weight over a ball that straddles nothing singular
  const MassResult m4 = ball_mass(w, {2.0, 0.0, 0.0}, 1.0, -1);
  CHECK(m4.converged);
  CHECK(m4.value > 0.0);
}

TEST_CASE("a2 products: scale-free for |x|, divergent for |x|^3.5") {
  WeightSpec w;
  w.dim = 3;
  w.rho.kind = RhoKind::radial_power;
  w.rho.alpha = 1.0;
  const std::vector<double> radii = {1.0, 0.5, 0.25, 0.125, 0.0625};

  const A2Result ok = a2_estimate(w, {0.0, 0.0, 0.0}, radii);
  CHECK(ok.all_converged);
  // avg(|x|) avg(|x|^{-1}) over B_r = (3r/4)(3/(2r)) = 9/8 at every radius
  for (const A2Entry& e : ok.entries) CHECK(e.product == doctest::Approx(9.0 / 8.0).epsilon(1e-9));
  CHECK(ok.spread == doctest::Approx(1.0).epsilon(1e-9));

  w.rho.alpha = 3.5;
  const A2Result div = a2_estimate(w, {0.0, 0.0, 0.0}, radii);
  CHECK_FALSE(div.all_converged);  // avg of psi^{-1} is a divergent integral
  CHECK(div.monotone);
  // regularised products scale like sqrt(r): family growth (16)^{1/2} = 4 over
  // radii 1..1/16; growth must at least clear that ballpark
  CHECK(div.growth_factor > 3.0);
  CHECK(div.growth_factor < 6.0);
}
