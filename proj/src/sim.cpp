#include "skewflow/sim.hpp"

namespace skewflow {

Path simulate(const WeightSpec& w, const SimConfig& cfg, const Vec& x0,
              uint64_t seed, uint64_t path_index) {
  Stepper st(w, cfg);
  Path p;
  p.dim = st.dim();
  p.dt = cfg.dt;
  p.ledger_names = st.ledger_names();
  p.times.reserve(st.n_steps() + 1);
  p.states.reserve((st.n_steps() + 1) * p.dim);
  p.ledgers.assign(st.n_ledgers(), {});
  for (auto& l : p.ledgers) l.reserve(st.n_steps() + 1);

  Stepper::State s;
  st.init(s, x0);
  CounterRng rng(seed, path_index);
  std::vector<double> inc(std::max<size_t>(1, st.n_ledgers()));
  std::vector<double> cum(st.n_ledgers(), 0.0);

  p.times.push_back(0.0);
  p.states.insert(p.states.end(), x0.begin(), x0.end());
  for (size_t i = 0; i < cum.size(); ++i) p.ledgers[i].push_back(0.0);

  for (size_t k = 0; k < st.n_steps(); ++k) {
    st.advance(s, rng, inc.data());
    p.times.push_back(double(k + 1) * cfg.dt);
    p.states.insert(p.states.end(), s.x.begin(), s.x.end());
    for (size_t i = 0; i < cum.size(); ++i) {
      cum[i] += inc[i];
      p.ledgers[i].push_back(cum[i]);
    }
    if (s.status != PathStatus::alive) break;
  }
  p.status = s.status;
  p.end_time = p.times.back();
  return p;
}

}  // namespace skewflow
