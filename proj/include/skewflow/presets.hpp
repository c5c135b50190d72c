#pragma once
// Curated run configurations: one per built-in numeric check plus showcases
// of the weight constructions (skew slabs, annuli, accumulating interfaces).
#include <string>
#include <vector>

#include "skewflow/report.hpp"

namespace skewflow {

struct Preset {
  std::string name;
  std::string description;
  ordered_json config;
};

const std::vector<Preset>& presets();

// nullptr when the name is unknown
const Preset* find_preset(const std::string& name);

}  // namespace skewflow
