#pragma once

#include <cstdint>
#include <string>

#include "o3/syntax.hpp"

namespace o3::testing {

struct GenOptions {
  int max_procs = 6;
  int max_instrs = 12;
  int max_depth = 2;  // procedure nesting below main
};

/// Source text of a random well-formed, projectable program. Keyed
/// instructions never exceed `max_instrs`; calls pass value arguments only.
std::string generate_source(std::uint64_t seed, const GenOptions& opts = {});

Program generate_program(std::uint64_t seed, const GenOptions& opts = {});

}  // namespace o3::testing
