#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "skewflow/rng.hpp"
#include "skewflow/sim.hpp"
#include "skewflow/stats.hpp"
#include "skewflow/weights.hpp"

using namespace skewflow;

namespace {

WeightSpec slab_weight(double lo, double hi) {
  WeightSpec w;
  w.dim = 3;
  w.phi.kind = PhiKind::slabs;
  w.phi.inner_values = {lo};
  w.phi.outer_values = {hi};
  return w;
}

struct EndpointObs {
  double* out = nullptr;
  PathStatus* status = nullptr;
  void step(const StepView&) {}
  void finish(const Stepper::State& s) {
    std::copy(s.x.begin(), s.x.end(), out);
    if (status) *status = s.status;
  }
};

// flat (n_paths x dim) endpoint matrix
std::vector<double> endpoints(const Stepper& st, const Vec& x0, size_t n,
                              uint64_t seed, int workers,
                              std::vector<PathStatus>* status = nullptr) {
  std::vector<double> out(n * st.dim());
  if (status) status->assign(n, PathStatus::alive);
  run_paths(st, x0, n, seed, workers, [&](size_t i) {
    return EndpointObs{&out[i * st.dim()], status ? &(*status)[i] : nullptr};
  });
  return out;
}

}  // namespace

TEST_CASE("driftless engine reproduces brownian endpoint statistics") {
  const WeightSpec w;  // rho = phi = 1
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  const Stepper st(w, cfg);
  const size_t n = 20000;
  const auto e = endpoints(st, {0.0, 0.0, 0.0}, n, 99, 4);

  std::vector<double> first(n), nsq(n);
  for (size_t i = 0; i < n; ++i) {
    first[i] = e[i * 3];
    nsq[i] = norm2(&e[i * 3], 3);
  }
  const MeanVar mf = mean_var(first);
  CHECK(std::fabs(mf.mean) <= 4.0 * mf.stderr_);
  CHECK(mf.var == doctest::Approx(1.0).epsilon(0.05));
  const MeanVar mn = mean_var(nsq);
  CHECK(mn.mean == doctest::Approx(3.0).epsilon(4.0 * mn.stderr_ / 3.0));

  const KsResult ks = ks_test(first, [](double v) { return normal_cdf(v); });
  CHECK(ks.p_value > 1e-3);
}

TEST_CASE("drift_step taming algebra is exact") {
  WeightSpec w;
  w.rho.kind = RhoKind::radial_power;
  w.rho.alpha = 1.0;
  SimConfig cfg;
  cfg.dt = 0.01;
  const double x[3] = {1.0, 0.0, 0.0};
  const double z[3] = {0.0, 0.0, 0.0};
  double y[3];
  drift_step(w, cfg, x, z, y);  // coef = alpha/(2 r^2) = 1/2, |b| = 1/2 < cap
  CHECK(y[0] == doctest::Approx(1.0 + 0.5 * cfg.dt).epsilon(1e-15));
  CHECK(y[1] == 0.0);

  cfg.drift_cap = 0.1;  // now |b| = 1/2 > M: scaled by 1/5
  drift_step(w, cfg, x, z, y);
  CHECK(y[0] == doctest::Approx(1.0 + 0.1 * cfg.dt).epsilon(1e-15));

  const double z1[3] = {2.0, -1.0, 0.5};
  cfg.drift_cap = 1e3;
  drift_step(w, cfg, x, z1, y);
  CHECK(y[2] == doctest::Approx(std::sqrt(cfg.dt) * 0.5).epsilon(1e-15));
}

TEST_CASE("skew flip is deterministic at the extreme biases") {
  CounterRng rng(5, 0);
  for (int i = 0; i < 100; ++i) {
    const double v0 = -0.2 - 0.3 * rng.next_uniform();
    const double v1 = 0.1 + 0.4 * rng.next_uniform();
    const SkewEvent up = skew_cross_1d(v0, v1, 0.0, 1.0, 0.01, rng);
    CHECK(up.triggered);
    CHECK(up.value == doctest::Approx(std::fabs(v1)));
    const SkewEvent dn = skew_cross_1d(v0, v1, 0.0, 0.0, 0.01, rng);
    CHECK(dn.value == doctest::Approx(-std::fabs(v1)));
  }
  // far from the level nothing happens and no randomness is consumed
  CounterRng a(5, 1), b(5, 1);
  const SkewEvent none = skew_cross_1d(0.5, 0.6, 0.0, 0.7, 0.01, a);
  CHECK_FALSE(none.triggered);
  CHECK(none.value == 0.6);
  CHECK(a.next_u64() == b.next_u64());
  // landing inside the band triggers even without a sign change
  CounterRng r3(6, 0);
  const SkewEvent band = skew_cross_1d(0.2, 0.005, 0.0, 0.7, 0.01, r3);
  CHECK(band.triggered);
}

TEST_CASE("hyperplane skew biases the endpoint sign at the engine level") {
  const WeightSpec w = slab_weight(0.5, 1.5);  // beta = 3/4 upward
  SimConfig cfg;
  cfg.dt = 5e-4;
  cfg.horizon = 0.2;
  const Stepper st(w, cfg);
  REQUIRE(st.n_ledgers() == 1);
  const size_t n = 4000;
  const auto e = endpoints(st, {0.0, 0.0, 0.0}, n, 4242, 2);
  size_t up = 0;
  std::vector<double> lastsq(n);
  for (size_t i = 0; i < n; ++i) {
    up += e[i * 3 + 2] > 0.0;
    lastsq[i] = e[i * 3 + 2] * e[i * 3 + 2];
  }
  const double frac = double(up) / double(n);
  CHECK(std::fabs(frac - 0.75) <= 4.0 * std::sqrt(0.75 * 0.25 / double(n)));
  // |skew BM| has the law of |BM|: second moment is unchanged
  const MeanVar m2 = mean_var(lastsq);
  CHECK(std::fabs(m2.mean - cfg.horizon) <= 4.0 * m2.stderr_);
}

TEST_CASE("results are independent of the worker partition") {
  WeightSpec w = slab_weight(1.0, 2.0);
  w.rho.kind = RhoKind::radial_power;
  w.rho.alpha = 0.5;
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 0.4;
  const Stepper st(w, cfg);
  const Vec x0 = {0.0, 0.0, 0.7};
  const size_t n = 501;  // odd count: uneven chunks
  const auto a = endpoints(st, x0, n, 31, 1);
  const auto b = endpoints(st, x0, n, 31, 3);
  REQUIRE(a.size() == b.size());
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

TEST_CASE("reflection confines the path and charges the boundary ledger") {
  const WeightSpec w;
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 2.0;
  cfg.mode = Mode::reflected;
  cfg.domain.kind = DomainKind::ball;
  cfg.domain.center = {0.0, 0.0, 0.0};
  cfg.domain.radius = 1.0;
  const Path p = simulate(w, cfg, {0.9, 0.0, 0.0}, 17);
  REQUIRE(p.ledger_names.size() == 1);
  CHECK(p.ledger_names[0] == "boundary");
  for (size_t i = 0; i <= p.n_steps(); ++i)
    CHECK(norm(p.state(i), 3) <= 1.0 + 1e-9);
  const auto& led = p.ledgers[0];
  CHECK(led.front() == 0.0);
  CHECK(led.back() > 0.0);
  CHECK(std::is_sorted(led.begin(), led.end()));
}

TEST_CASE("kill floor ends the path at the first sub-floor state") {
  WeightSpec w;
  w.rho.kind = RhoKind::radial_power;
  w.rho.alpha = 1.0;
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  cfg.mode = Mode::killed;
  cfg.kill_floor_scale = 2.0;  // floor = 2 > rho anywhere near the start
  const Path p = simulate(w, cfg, {0.5, 0.0, 0.0}, 3);
  CHECK(p.status == PathStatus::killed);
  CHECK(p.times.size() == 2);  // dies on the very first step
  CHECK(p.end_time == doctest::Approx(cfg.dt));

  // with the default floor the same dynamics is conservative
  cfg.kill_floor_scale = 1e-12;
  const Stepper st(w, cfg);
  std::vector<PathStatus> status;
  endpoints(st, {0.5, 0.0, 0.0}, 300, 11, 2, &status);
  for (PathStatus s : status) CHECK(s == PathStatus::alive);
}

TEST_CASE("construction rejects unresolvable geometry") {
  SimConfig cfg;
  cfg.dt = 1e-3;  // 6*sqrt(dt) ~ 0.19

  WeightSpec tight = slab_weight(1.0, 2.0);
  tight.phi.outer_levels = {0.1, 0.2};
  tight.phi.outer_values = {2.0, 3.0, 1.0};
  CHECK_THROWS_AS(Stepper(tight, cfg), std::invalid_argument);

  WeightSpec inner;
  inner.dim = 3;
  inner.phi.kind = PhiKind::annuli;
  inner.phi.m0 = 0.05;  // sphere interface inside the 6*sqrt(dt) collar
  inner.phi.inner_values = {2.0};
  inner.phi.outer_values = {1.0};
  CHECK_THROWS_AS(Stepper(inner, cfg), std::invalid_argument);

  WeightSpec box;
  box.dim = 3;
  box.phi.kind = PhiKind::lipschitz_domain;
  box.phi.beta_out = 0.3;
  box.phi.domain.kind = DomainKind::polytope;
  box.phi.domain.normals = {{0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}};
  box.phi.domain.offsets = {1.0, 1.0};
  CHECK_THROWS_AS(Stepper(box, cfg), std::invalid_argument);

  const WeightSpec w = slab_weight(0.5, 1.5);
  SimConfig narrow = cfg;
  narrow.skew_band = 0.5 * std::sqrt(cfg.dt);
  CHECK_THROWS_AS(Stepper(w, narrow), std::invalid_argument);

  SimConfig shorty = cfg;
  shorty.horizon = 1e-4;
  CHECK_THROWS_AS(Stepper(w, shorty), std::invalid_argument);

  SimConfig refl = cfg;
  refl.mode = Mode::reflected;  // domain left as full space
  CHECK_THROWS_AS(Stepper(w, refl), std::invalid_argument);

  WeightSpec steep;
  steep.rho.kind = RhoKind::radial_power;
  steep.rho.alpha = 2.5;
  const Stepper st(steep, cfg);
  Stepper::State s;
  CHECK_THROWS_AS(st.init(s, {0.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(st.init(s, {1.0, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(st.init(s, {1.0, 0.0, 0.0}));
}

TEST_CASE("materialized paths are aligned and replay byte-identically") {
  const WeightSpec w = slab_weight(0.5, 1.5);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 0.05;
  const Path p = simulate(w, cfg, {0.0, 0.0, 0.0}, 7);
  CHECK(p.dim == 3);
  CHECK(p.dt == cfg.dt);
  CHECK(p.times.size() == 51);
  CHECK(p.states.size() == p.times.size() * 3);
  REQUIRE(p.ledgers.size() == p.ledger_names.size());
  CHECK(p.ledger_names[0].rfind("plane@", 0) == 0);
  for (const auto& led : p.ledgers) {
    CHECK(led.size() == p.times.size());
    CHECK(std::is_sorted(led.begin(), led.end()));
  }
  const Path q = simulate(w, cfg, {0.0, 0.0, 0.0}, 7);
  CHECK(std::memcmp(p.states.data(), q.states.data(),
                    p.states.size() * sizeof(double)) == 0);
}
