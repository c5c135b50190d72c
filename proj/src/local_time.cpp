#include "skewflow/local_time.hpp"

#include <stdexcept>

namespace skewflow {

namespace {
size_t resolve_axis(const Path& p, int axis) {
  const int d = int(p.dim);
  if (axis < 0) return size_t(d - 1);
  if (axis >= d) throw std::invalid_argument("local_time: axis out of range");
  return size_t(axis);
}
}  // namespace

double tanaka_local_time(const Path& p, double level, int axis) {
  const size_t a = resolve_axis(p, axis);
  TanakaAccum acc;
  acc.level = level;
  acc.axis = a;
  for (size_t k = 0; k + 1 < p.times.size(); ++k)
    acc.observe(p.state(k)[a], p.state(k + 1)[a]);
  return acc.value();
}

double occupation_local_time(const Path& p, double level, double eps, int axis) {
  const size_t a = resolve_axis(p, axis);
  if (eps < 2.0 * std::sqrt(p.dt))
    throw std::invalid_argument("local_time: band must be at least 2*sqrt(dt)");
  OccupationAccum acc;
  acc.level = level;
  acc.eps = eps;
  acc.dt = p.dt;
  for (size_t k = 0; k + 1 < p.times.size(); ++k) acc.observe(p.state(k)[a]);
  return acc.value();
}

double sphere_local_time(const Path& p, double radius, double eps) {
  if (eps < 2.0 * std::sqrt(p.dt))
    throw std::invalid_argument("local_time: band must be at least 2*sqrt(dt)");
  OccupationAccum acc;
  acc.level = radius;
  acc.eps = eps;
  acc.dt = p.dt;
  for (size_t k = 0; k + 1 < p.times.size(); ++k)
    acc.observe(norm(p.state(k), p.dim));
  return acc.value();
}

DiscountedLedger revuz_discounted(const Path& p, size_t slot) {
  if (slot >= p.ledgers.size())
    throw std::invalid_argument("local_time: ledger slot out of range");
  const std::vector<double>& l = p.ledgers[slot];
  DiscountAccum acc;
  for (size_t k = 0; k + 1 < l.size(); ++k)
    acc.observe(p.times[k], l[k + 1] - l[k]);
  DiscountedLedger out;
  out.value = acc.value();
  out.tail_bound = acc.tail_bound();
  return out;
}

}  // namespace skewflow
