#pragma once
// Counter-based splittable RNG.
//
// Each path gets its own stream keyed by (master seed, path index); a draw is
// the splitmix64 finalizer applied to key + n*golden, i.e. splitmix64 with
// initial state = key and counter n. Streams are decided by the path index
// alone, so results are independent of how paths are distributed over worker
// threads. splitmix64 passes BigCrush; distinct keys give disjoint statistical
// streams for Monte-Carlo purposes.
#include <cmath>
#include <cstdint>

namespace skewflow {

inline uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

class CounterRng {
 public:
  CounterRng(uint64_t master_seed, uint64_t stream) {
    // two finalizer rounds decorrelate (seed, stream) pairs
    key_ = mix64(mix64(master_seed + 0x9E3779B97F4A7C15ull) ^
                 mix64(stream * 0xD1342543DE82EF95ull + 0x2545F4914F6CDD1Dull));
  }

  uint64_t next_u64() { return mix64(key_ + (++n_) * 0x9E3779B97F4A7C15ull); }

  // uniform in (0,1]; never 0 so log() is safe
  double next_uniform() { return ((next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  double next_sign(double p_plus) { return next_uniform() <= p_plus ? 1.0 : -1.0; }

  // trigonometric Box-Muller: fixed draw count (2 uniforms per pair),
  // fully deterministic given the counter position
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  void fill_normal(double* out, size_t d) {
    for (size_t i = 0; i < d; ++i) out[i] = next_normal();
  }

 private:
  uint64_t key_ = 0;
  uint64_t n_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace skewflow
