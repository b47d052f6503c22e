#include "o3/scenario.hpp"

#include <filesystem>
#include <set>

#include "o3/errors.hpp"

namespace o3 {

namespace {
const std::set<std::string> kPresets = {"buyitem", "streamit", "forwarding", "producers", "procx", "none"};
}

StateMap scenario_state(const Program& prog, const ScenarioOptions& opts) {
  if (!kPresets.count(opts.name)) throw ConfigError("unknown scenario '" + opts.name + "'");
  StateMap sigma;
  for (const auto& p : pn(prog.main)) {
    ProcState s;
    s.counter = opts.counter;
    if (opts.name == "buyitem") s.store["stock"] = Value::integer(opts.stock);
    if (opts.name == "streamit") s.store["remaining"] = Value::integer(opts.items);
    sigma.emplace(p, std::move(s));
  }
  return sigma;
}

std::string infer_scenario(const std::string& path) {
  const std::string stem = std::filesystem::path(path).stem().string();
  return kPresets.count(stem) ? stem : "none";
}

}  // namespace o3
