#include "skewflow/presets.hpp"

namespace skewflow {
namespace {

Preset make(const char* name, const char* description, const char* json) {
  Preset p;
  p.name = name;
  p.description = description;
  p.config = ordered_json::parse(json);
  return p;
}

std::vector<Preset> build() {
  std::vector<Preset> v;

  v.push_back(make("skew-hyperplane",
                   "skew BM across one hyperplane (beta=0.75): endpoint sign law + KS",
                   R"({
    "experiment": "simulate",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "constant"},
               "phi": {"kind": "slabs", "inner_values": [0.5], "outer_values": [1.5]}},
    "sim": {"dt": 1e-4, "horizon": 1.0},
    "params": {
      "x0": [0.0, 0.0, 0.0],
      "n_paths": 100000,
      "checks": ["conservative",
                 {"name": "skew_law", "beta": 0.75, "level": 0.0,
                  "frac_lo": 0.73, "frac_hi": 0.77, "alpha": 0.01},
                 {"name": "variance", "axes": [0, 1]}]
    }
  })"));

  v.push_back(make("bessel-moments",
                   "radial second-moment identity E|X_t|^2 = |x0|^2 + (d+alpha)t",
                   R"({
    "experiment": "bessel",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "constant"}, "phi": {"kind": "uniform"}},
    "sim": {"dt": 1e-3, "horizon": 1.0},
    "params": {"alphas": [1.0, -1.0, 0.0], "x0": [1.0, 0.0, 0.0], "ts": [1.0],
               "n_paths": 100000, "tol": 0.02}
  })"));

  v.push_back(make("local-time-bm",
                   "Tanaka vs band-occupation local time of BM at level 0",
                   R"({
    "experiment": "local_time",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "constant"}, "phi": {"kind": "uniform"}},
    "sim": {"dt": 1e-4, "horizon": 1.0},
    "params": {"n_paths": 25000, "eps": 0.02, "band_tol": 0.02, "pair_tol": 0.03}
  })"));

  v.push_back(make("revuz-identity",
                   "discounted level-0 ledger vs resolvent of the surface measure",
                   R"({
    "experiment": "revuz",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "constant"}, "phi": {"kind": "uniform"}},
    "sim": {"dt": 1e-4, "horizon": 8.0},
    "params": {"n_paths": 6000, "target": 0.7071067811865476, "tol": 0.03,
               "ci_k": 3.0, "resolvent": {"n_paths": 4000, "kernel_h": 0.02}}
  })"));

  v.push_back(make("conservative-attract",
                   "no killing/divergence under the attracting drift alpha=-1",
                   R"({
    "experiment": "simulate",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "radial_power", "alpha": -1.0},
               "phi": {"kind": "uniform"}},
    "mode": "killed",
    "sim": {"dt": 1e-3, "horizon": 1.0},
    "params": {"x0": [1.0, 0.0, 0.0], "n_paths": 10000, "checks": ["conservative"]}
  })"));

  v.push_back(make("conservative-mild",
                   "no killing/divergence under the mild outward drift alpha=0.5",
                   R"({
    "experiment": "simulate",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "radial_power", "alpha": 0.5},
               "phi": {"kind": "uniform"}},
    "mode": "killed",
    "sim": {"dt": 1e-3, "horizon": 1.0},
    "params": {"x0": [1.0, 0.0, 0.0], "n_paths": 10000, "checks": ["conservative"]}
  })"));

  v.push_back(make("conservative-strong",
                   "no killing/divergence under the strong outward drift alpha=1.5",
                   R"({
    "experiment": "simulate",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "radial_power", "alpha": 1.5},
               "phi": {"kind": "uniform"}},
    "mode": "killed",
    "sim": {"dt": 1e-3, "horizon": 1.0},
    "params": {"x0": [1.0, 0.0, 0.0], "n_paths": 10000, "checks": ["conservative"]}
  })"));

  v.push_back(make("riesz-newton",
                   "Newtonian potential of the unit ball at 0 and (2,0,0) + smoothness probe",
                   R"({
    "experiment": "riesz",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "constant"}, "phi": {"kind": "uniform"}},
    "params": {"eta": 2.0, "support_radius": 1.0,
               "points": [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]],
               "targets": [6.283185307179586, 2.0943951023931953],
               "tol": 1e-3,
               "holder": {"target": 1.0, "lo": 0.3, "hi": 2.1, "n": 16}}
  })"));

  v.push_back(make("a2-bounded",
                   "A2 products stay flat across shrinking balls for |x| (alpha=1)",
                   R"({
    "experiment": "a2",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "radial_power", "alpha": 1.0},
               "phi": {"kind": "uniform"}},
    "params": {"radii": [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125],
               "expect": "bounded", "spread_max": 1.2}
  })"));

  v.push_back(make("a2-divergent",
                   "A2 products grow without bound for |x|^3.5 (outside the A2 class)",
                   R"({
    "experiment": "a2",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "radial_power", "alpha": 3.5},
               "phi": {"kind": "uniform"}},
    "params": {"radii": [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125],
               "expect": "divergent", "growth_min": 10.0}
  })"));

  v.push_back(make("resolvent-envelope",
                   "kernel KDE sandwiched between the power-law envelopes (alpha=1)",
                   R"({
    "experiment": "envelope",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "radial_power", "alpha": 1.0},
               "phi": {"kind": "uniform"}},
    "sim": {"dt": 2e-3, "horizon": 6.0},
    "params": {"bandwidth": 0.1, "n_paths": 3000, "stability_tol": 0.2}
  })"));

  v.push_back(make("reflected-ball",
                   "normally reflected BM in the unit ball: uniform occupation + boundary ledger",
                   R"({
    "experiment": "simulate",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "constant"}, "phi": {"kind": "uniform"}},
    "mode": "reflected",
    "domain": {"kind": "ball", "center": [0.0, 0.0, 0.0], "radius": 1.0},
    "sim": {"dt": 1e-5, "horizon": 50.0},
    "params": {
      "x0": [0.5, 0.0, 0.0],
      "n_paths": 100,
      "checks": ["ball_confinement",
                 {"name": "uniform_occupation", "bins": 8, "burn_in": 2.0,
                  "spacing": 1.0, "alpha": 0.01},
                 {"name": "boundary_ledger", "min_frac": 0.99}]
    }
  })"));

  v.push_back(make("feller-c0",
                   "P_t f -> f as t down to 0 on a grid; vanishing far field (alpha=-1,1)",
                   R"({
    "experiment": "feller",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "constant"}, "phi": {"kind": "uniform"}},
    "sim": {"dt": 1e-3, "horizon": 1.0},
    "params": {"alphas": [-1.0, 1.0], "n_paths": 10000, "far_tol": 1e-6}
  })"));

  v.push_back(make("determinism-probe",
                   "batch statistics are identical across repeat runs and worker counts",
                   R"({
    "experiment": "simulate",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "radial_power", "alpha": 0.5},
               "phi": {"kind": "slabs", "inner_values": [1.0], "outer_values": [3.0]}},
    "sim": {"dt": 1e-3, "horizon": 1.0},
    "params": {"x0": [0.0, 0.0, 1.0], "n_paths": 2000,
               "checks": ["conservative",
                          {"name": "determinism", "n_paths": 1000, "workers_alt": 4}]}
  })"));

  v.push_back(make("symmetry-slab",
                   "m-symmetry of the kernel under drift alpha=1 with a beta=0.75 slab",
                   R"({
    "experiment": "symmetry",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "radial_power", "alpha": 1.0},
               "phi": {"kind": "slabs", "inner_values": [0.5], "outer_values": [1.5]}},
    "sim": {"dt": 1e-3, "horizon": 1.0},
    "params": {"t": 0.4, "n_paths": 1200000, "tol": 0.03,
               "f": {"center": [0.45, 0.0, 0.15], "radius": 0.9},
               "g": {"center": [0.45, 0.0, -0.15], "radius": 0.9},
               "box_lo": [-0.5, -0.95, -1.1], "box_hi": [1.4, 0.95, 1.1]}
  })"));

  v.push_back(make("annuli-skew",
                   "skew crossing of a sphere interface from a piecewise-annular density",
                   R"({
    "experiment": "simulate",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "constant"},
               "phi": {"kind": "annuli", "m0": 1.0,
                       "inner_values": [2.0], "outer_values": [1.0]}},
    "sim": {"dt": 1e-4, "horizon": 1.0},
    "params": {"x0": [1.0, 0.0, 0.0], "n_paths": 5000, "checks": ["conservative"]}
  })"));

  v.push_back(make("slab-accumulating",
                   "slab family accumulating at 0; sub-threshold interfaces are dropped",
                   R"({
    "experiment": "simulate",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "constant"},
               "phi": {"kind": "slabs",
                       "inner_values": [1.0],
                       "outer_levels": [0.0078125, 0.015625, 0.03125, 0.0625,
                                        0.125, 0.25, 0.5, 1.0],
                       "outer_values": [1.00006103515625, 1.000244140625,
                                        1.0009765625, 1.00390625, 1.015625,
                                        1.0625, 1.25, 2.0, 1.0]}},
    "sim": {"dt": 2e-5, "horizon": 0.5},
    "params": {"x0": [0.0, 0.0, 0.7], "n_paths": 1000, "checks": ["conservative"]}
  })"));

  v.push_back(make("lipschitz-skew",
                   "two-phase density across a ball boundary (skew sphere crossing)",
                   R"({
    "experiment": "simulate",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "constant"},
               "phi": {"kind": "lipschitz_domain", "beta_out": 0.3,
                       "domain": {"kind": "ball", "center": [0.0, 0.0, 0.0],
                                  "radius": 1.0}}},
    "sim": {"dt": 1e-4, "horizon": 1.0},
    "params": {"x0": [1.0, 0.0, 0.0], "n_paths": 5000, "checks": ["conservative"]}
  })"));

  v.push_back(make("heat-kernel-bound",
                   "KDE of p_t under |x| weight: unit mass + Gaussian upper bound",
                   R"({
    "experiment": "kernel_bound",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "radial_power", "alpha": 1.0},
               "phi": {"kind": "uniform"}},
    "sim": {"dt": 1e-3, "horizon": 1.0},
    "params": {"ts": [0.1, 0.2, 0.4], "n_paths": 20000}
  })"));

  v.push_back(make("nash-ball",
                   "Nash inequality on the unit ball for the |x| weight (d=3)",
                   R"({
    "experiment": "nash",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "radial_power", "alpha": 1.0},
               "phi": {"kind": "uniform"}},
    "params": {"radius": 1.0}
  })"));

  v.push_back(make("nash-disc",
                   "Nash inequality on the unit disc with the dimension-shift exponent (d=2)",
                   R"({
    "experiment": "nash",
    "seed": 42,
    "weight": {"dimension": 2, "rho": {"kind": "radial_power", "alpha": 0.5},
               "phi": {"kind": "uniform"}},
    "params": {"radius": 1.0, "delta": 0.5}
  })"));

  v.push_back(make("s00-newtonian",
                   "resolvent potential of the unit-ball density dominated by its Newtonian bound",
                   R"({
    "experiment": "s00",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "constant"}, "phi": {"kind": "uniform"}},
    "sim": {"dt": 1e-3, "horizon": 8.0},
    "params": {"variant": "lebesgue_ball", "n_paths": 3000, "tol": 0.05}
  })"));

  v.push_back(make("s00-sphere",
                   "resolvent potential of the unit-sphere measure under the |x| weight (recorded)",
                   R"({
    "experiment": "s00",
    "seed": 42,
    "weight": {"dimension": 3, "rho": {"kind": "radial_power", "alpha": 1.0},
               "phi": {"kind": "uniform"}},
    "sim": {"dt": 1e-3, "horizon": 8.0},
    "params": {"variant": "sphere_measure", "n_paths": 2500, "kernel_h": 0.05}
  })"));

  return v;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> kPresets = build();
  return kPresets;
}

const Preset* find_preset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace skewflow
