#include <doctest.h>

#include <cmath>
#include <vector>

#include "skewflow/rng.hpp"
#include "skewflow/stats.hpp"

using namespace skewflow;

TEST_CASE("kahan summation keeps small terms") {
  KahanSum s;
  s.add(1.0);
  for (int i = 0; i < 10000000; ++i) s.add(1e-16);
  CHECK(s.value() == doctest::Approx(1.0 + 1e-9).epsilon(1e-12));
}

TEST_CASE("mean_var on a known sample") {
  const MeanVar mv = mean_var({1.0, 2.0, 3.0, 4.0});
  CHECK(mv.mean == doctest::Approx(2.5));
  CHECK(mv.var == doctest::Approx(5.0 / 3.0));
  CHECK(mv.stderr_ == doctest::Approx(std::sqrt(5.0 / 12.0)));
}

TEST_CASE("normal cdf reference values") {
  // classic table values: Phi(0)=1/2, Phi(1)=0.841344746..., Phi(-1.96)=0.0249979
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(normal_cdf(-1.96) == doctest::Approx(0.024997895148220435).epsilon(1e-10));
  CHECK(normal_cdf(10.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("chi-square survival closed forms") {
  // sf(x,2) = exp(-x/2); sf(x,1) = 2(1 - Phi(sqrt(x)))
  CHECK(chi2_sf(3.0, 2.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-10));
  CHECK(chi2_sf(1.0, 1.0) == doctest::Approx(0.31731050786291415).epsilon(1e-8));
  CHECK(gamma_p(2.5, 1.3) + gamma_q(2.5, 1.3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chi-square test separates uniform from concentrated") {
  const std::vector<double> probs(8, 0.125);
  const ChiSquareResult flat = chi_square_test({100, 100, 100, 100, 100, 100, 100, 100}, probs);
  CHECK(flat.p_value == doctest::Approx(1.0).epsilon(1e-9));
  const ChiSquareResult spike = chi_square_test({800, 0, 0, 0, 0, 0, 0, 0}, probs);
  CHECK(spike.p_value < 1e-12);
}

TEST_CASE("ks test accepts its own cdf and rejects a shift") {
  CounterRng rng(7, 0);
  std::vector<double> z(4000);
  for (double& v : z) v = rng.next_normal();
  const KsResult ok = ks_test(z, [](double x) { return normal_cdf(x); });
  CHECK(ok.p_value > 0.01);
  for (double& v : z) v += 0.4;
  const KsResult bad = ks_test(z, [](double x) { return normal_cdf(x); });
  CHECK(bad.p_value < 1e-6);
}

TEST_CASE("least squares recovers an exact line") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 9; ++i) {
    xs.push_back(0.3 * i - 1.0);
    ys.push_back(2.0 * xs.back() + 1.0);
  }
  const LineFit fit = least_squares(xs, ys);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("counter rng: reproducible, split, normal moments") {
  CounterRng a(123, 5), b(123, 5), c(123, 6);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());

  CounterRng r(2024, 0);
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.next_normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::fabs(s1 / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));

  CounterRng sgn(99, 1);
  int up = 0;
  for (int i = 0; i < 100000; ++i)
    if (sgn.next_sign(0.75) > 0) ++up;
  CHECK(double(up) / 100000 == doctest::Approx(0.75).epsilon(0.02));
}
