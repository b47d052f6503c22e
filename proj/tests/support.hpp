#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "o3/parser.hpp"
#include "o3/scenario.hpp"

namespace o3::testing {

inline std::string corpus_path(const std::string& stem) { return std::string(O3_CORPUS_DIR) + "/" + stem + ".chor"; }

inline Program load_corpus(const std::string& stem) {
  std::ifstream in(corpus_path(stem));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str(), stem);
}

inline StateMap corpus_state(const Program& prog, const std::string& stem, std::int64_t items = 2) {
  ScenarioOptions opts;
  opts.name = stem;
  opts.items = items;
  return scenario_state(prog, opts);
}

}  // namespace o3::testing
