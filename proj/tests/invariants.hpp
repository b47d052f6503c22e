#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "o3/chor_exec.hpp"
#include "o3/syntax.hpp"

namespace o3::testing {

struct PropertyReport {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0 && cases > 0; }
  void fail(const std::string& what) {
    if (failures++ == 0) first_failure = what;
  }
};

/// Configurations visited by one seeded random run, initial one included.
std::vector<ChorConfiguration> random_walk(const Program& prog, std::uint64_t seed, std::size_t bound = 200);

/// Receive keys at q outside call bodies q has not entered yet.
std::vector<KeyAnnot> visible_keys(const Choreography& c, const std::string& q);

bool includes(std::vector<KeyAnnot> big, std::vector<KeyAnnot> small);

// Generated programs are drawn from seeds 0, 1, ... in order.
PropertyReport receive_keys_static(int programs);
PropertyReport receive_keys_reachable(int programs);
PropertyReport subst_projection(int cases);
PropertyReport subst_branching(int cases);
PropertyReport projection_sequencing(int programs);
PropertyReport token_algebra(int samples);

}  // namespace o3::testing
