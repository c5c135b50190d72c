#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "skewflow/local_time.hpp"
#include "skewflow/quadrature.hpp"
#include "skewflow/sim.hpp"
#include "skewflow/stats.hpp"

using namespace skewflow;

namespace {

// many short BM paths; reduce f(path) to a sample vector
template <class F>
std::vector<double> path_samples(const SimConfig& cfg, size_t n, uint64_t seed, F&& f) {
  const WeightSpec w;
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = f(simulate(w, cfg, {0.0, 0.0, 0.0}, seed, i));
  return out;
}

}  // namespace

TEST_CASE("tanaka estimator is unbiased for brownian local time at 0") {
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  // E L_1^0 = sqrt(2/pi) ~ 0.7979
  const auto xs = path_samples(cfg, 4000, 1234,
                               [](const Path& p) { return tanaka_local_time(p, 0.0); });
  const MeanVar mv = mean_var(xs);
  CHECK(std::fabs(mv.mean - std::sqrt(2.0 / kPi)) <= 4.0 * mv.stderr_);
}

TEST_CASE("occupation estimator agrees up to band bias") {
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.horizon = 1.0;
  const double eps = 0.05;
  const auto xs = path_samples(cfg, 800, 77, [&](const Path& p) {
    return occupation_local_time(p, 0.0, eps);
  });
  const MeanVar mv = mean_var(xs);
  CHECK(mv.mean > 0.75);
  CHECK(mv.mean < 0.85);

  const Path p = simulate(WeightSpec{}, cfg, {0.0, 0.0, 0.0}, 1);
  CHECK_THROWS_AS(occupation_local_time(p, 0.0, 0.5 * std::sqrt(cfg.dt)),
                  std::invalid_argument);
  CHECK(sphere_local_time(p, 0.5, 0.05) >= 0.0);
}

TEST_CASE("streaming accumulators telescope exactly over a materialized path") {
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 0.5;
  const Path p = simulate(WeightSpec{}, cfg, {0.0, 0.0, 0.0}, 9);

  TanakaAccum tk;
  OccupationAccum oc;
  oc.eps = 0.07;  // >= 2*sqrt(dt)
  oc.dt = cfg.dt;
  for (size_t k = 0; k < p.n_steps(); ++k) {
    tk.observe(p.state(k)[2], p.state(k + 1)[2]);
    oc.observe(p.state(k)[2]);
  }
  CHECK(tk.value() == doctest::Approx(tanaka_local_time(p, 0.0)).epsilon(1e-12));
  CHECK(oc.value() == doctest::Approx(occupation_local_time(p, 0.0, 0.07)).epsilon(1e-12));
}

TEST_CASE("discount accumulator algebra on a hand ledger") {
  DiscountAccum d;
  d.observe(0.5, 1.0);
  d.observe(1.0, 0.0);  // idle step keeps the clock moving
  d.observe(1.5, 1.0);
  CHECK(d.value() == doctest::Approx(std::exp(-0.5) + std::exp(-1.5)).epsilon(1e-15));
  CHECK(d.total() == doctest::Approx(2.0));
  CHECK(d.tail_bound() == doctest::Approx(std::exp(-1.5) * 2.0 / 1.5).epsilon(1e-15));
}

TEST_CASE("revuz_discounted matches a hand reduction of the ledger") {
  WeightSpec w;
  w.dim = 3;
  w.phi.kind = PhiKind::slabs;
  w.phi.inner_values = {0.5};
  w.phi.outer_values = {1.5};
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 0.5;
  const Path p = simulate(w, cfg, {0.0, 0.0, 0.0}, 21);
  REQUIRE(p.ledgers.size() == 1);
  const DiscountedLedger dl = revuz_discounted(p, 0);

  KahanSum hand;
  for (size_t k = 0; k + 1 < p.times.size(); ++k) {
    const double inc = p.ledgers[0][k + 1] - p.ledgers[0][k];
    if (inc != 0.0) hand.add(std::exp(-p.times[k]) * inc);
  }
  CHECK(dl.value == doctest::Approx(hand.value()).epsilon(1e-12));
  CHECK(dl.value > 0.0);
  CHECK(dl.tail_bound > 0.0);
}
