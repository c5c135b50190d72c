#pragma once
// JSON experiment configs. Schema (all experiments):
//   {
//     "experiment": "simulate|local_time|revuz|bessel|a2|riesz|s00|envelope|
//                    symmetry|feller|kernel_bound|nash",
//     "seed": <required integer — no wall-clock seeding>,
//     "weight": {
//       "dimension": d,
//       "rho": {"kind": "constant|radial_power|log_modified", "c":, "alpha":,
//               "alpha_log":, "beta_pow":, "beta_log":},
//       "phi": {"kind": "uniform|annuli|slabs|lipschitz_domain", "c":,
//               "inner_levels": [], "inner_values": [], "outer_levels": [],
//               "outer_values": [], "m0":, "domain": {...}, "beta_out":}
//     },
//     "mode": "free|killed|reflected",
//     "domain": {"kind": "ball|half_space|polytope", ...}   (reflected mode),
//     "sim": {"dt":, "horizon":, "drift_cap":, "skew_band":, "observer_band":,
//             "kill_floor_scale":, "interface_threshold":},
//     "params": { experiment-specific knobs },
//     "out": "optional/report/dir"
//   }
// Unknown keys are rejected with a field path so typos cannot silently change
// an experiment.
#include <stdexcept>
#include <string>

#include "skewflow/report.hpp"
#include "skewflow/sim.hpp"
#include "skewflow/weights.hpp"

namespace skewflow {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  WeightSpec weight;
  Mode mode = Mode::free_motion;
  SimConfig sim;
  ordered_json params = ordered_json::object();
  uint64_t seed = 0;
  int workers = 1;  // flag-only; never part of the config file
  std::string out_dir;
};

// throws ConfigError with a field-level message
ExperimentConfig parse_config(const ordered_json& j);

// normalized echo used for hashing and the summary (excludes workers/out)
ordered_json canonical_config(const ExperimentConfig& cfg);

}  // namespace skewflow
