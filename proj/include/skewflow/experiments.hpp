#pragma once
// Named experiments behind the CLI: each takes a parsed config, runs the
// relevant estimators, and returns CheckReports plus deterministic extras.
#include "skewflow/config.hpp"
#include "skewflow/report.hpp"

namespace skewflow {

RunReport run_experiment(const ExperimentConfig& cfg);

}  // namespace skewflow
