#pragma once

#include <cstdint>
#include <string>

#include "o3/chor_exec.hpp"

namespace o3 {

struct ScenarioOptions {
  std::string name = "none";  // buyitem | streamit | forwarding | producers | procx | none
  std::int64_t items = 2;     // streamit: initial `remaining` of each producer
  std::int64_t stock = 1;     // buyitem: initial `stock` of the seller
  std::int64_t counter = 0;   // initial counter of every process
};

/// Initial Σ for every process of `prog` under the named preset.
/// Throws ConfigError on an unknown name.
StateMap scenario_state(const Program& prog, const ScenarioOptions& opts);

/// Preset named by a corpus file stem, or "none".
std::string infer_scenario(const std::string& path);

}  // namespace o3
