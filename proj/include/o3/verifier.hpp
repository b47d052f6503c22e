#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "o3/chor_exec.hpp"
#include "o3/proc_exec.hpp"

namespace o3 {

struct Violation {
  std::string property;  // preservation | progress | integrity | epp-completeness | epp-soundness | runtime
  std::string detail;
  std::vector<StepRecord> witness;
};

struct ExplorationResult {
  std::size_t states = 0;
  std::size_t edges = 0;
  std::size_t depth = 0;
  bool truncated = false;
  bool reduced = false;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

struct ExploreOptions {
  std::size_t depth = 200;
  std::size_t states = 200000;
  bool preservation = true;
  bool progress = true;
  bool integrity = true;
  /// Expand only one commuting transition where one is enabled. Every edge
  /// out of a visited state is still checked.
  bool reduce = true;
  std::size_t max_violations = 1;  // stop after this many
};

/// Index of an enabled transition that no other transition can disable and
/// that commutes with every other transition, if there is one: receives,
/// selections, call entry, and effect-free sends, assignments and guards.
std::optional<std::size_t> commuting_transition(const ChorConfiguration& cfg,
                                                const std::vector<TransitionCandidate>& cands);

struct LedgerEntry {
  std::string sender;
  std::string receiver;
  std::string variable;
  Value payload;
  std::size_t trace_index = 0;

  auto operator<=>(const LedgerEntry&) const = default;
};

using SendLedger = std::map<IntegrityKey, LedgerEntry>;

/// Breadth-first exploration of the choreography LTS checking preservation,
/// progress and integrity at every reachable configuration.
ExplorationResult explore_chor(const Program& prog, const StateMap& sigma, const ExploreOptions& opts = {});

/// Joint exploration of (C, N) pairs with N ⊒ ⟦C⟧ and equal Σ and K, checking
/// both directions of the correspondence on every edge.
ExplorationResult check_epp_correspondence(const Program& prog, const StateMap& sigma,
                                           const ExploreOptions& opts = {}, const NetOptions& net = {});

struct CivWitness {
  std::vector<StepRecord> trace;
  std::string process;
  std::string variable;
  IntegrityKey receive_key;  // key the receive expected
  IntegrityKey message_key;  // key the consumed message was sent under
  Value bound;
  std::optional<Value> expected;  // payload sent under receive_key, if sent yet
};

struct CivSearch {
  std::optional<CivWitness> witness;
  std::size_t states = 0;
  bool truncated = false;
};

/// Searches the projected network for a receive binding a payload sent under a
/// different key. Keyed mode must find nothing.
CivSearch find_civ(const Program& prog, const StateMap& sigma, KeyMode keys, std::size_t state_cap = 200000);

struct DelayOverride {
  std::string sender;        // with `nth`: the nth send of this process (1-based)
  std::size_t nth = 0;
  std::optional<IntegrityKey> key;  // or every send under this key
  double delay = 0;
};

struct LatencyOptions {
  DelayMode policy = DelayMode::Strict;
  Transport transport = Transport::Unordered;
  double compute_cost = 1;  // instructions whose expression applies a function
  double send_delay = 1;    // transit time of each message
  std::vector<DelayOverride> overrides;
};

struct LatencyEvent {
  double start = 0;
  double finish = 0;
  std::string process;
  std::string rule;
  IntegrityKey key;
  std::string function;  // head function of the evaluated expression, if any
};

struct LatencyResult {
  double makespan = 0;
  std::vector<LatencyEvent> events;
  bool completed = false;

  /// Finish time of the first event whose head function is `fn`.
  std::optional<double> first(const std::string& fn) const;
};

LatencyResult latency_sim(const Program& prog, const StateMap& sigma, const LatencyOptions& opts);

/// Parses {"compute": c, "send": d, "overrides": [{"sender": p, "nth": n, "delay": x} | {"key": [l,[..]], "delay": x}]}.
LatencyOptions latency_options_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StepRecord& s);
nlohmann::json to_json(const ExplorationResult& r);
nlohmann::json to_json(const CivSearch& r);
nlohmann::json to_json(const LatencyResult& r);

}  // namespace o3
