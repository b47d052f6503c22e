#pragma once

#include <optional>
#include <string>
#include <vector>

#include "o3/chor_exec.hpp"
#include "o3/epp.hpp"

namespace o3 {

enum class DelayMode {
  Strict,   // P-Delay never passes a branch of the same process
  Loose,    // P-Delay without side condition
  InOrder,  // no P-Delay: each process runs its program in order
};

enum class Transport {
  Unordered,  // any undelivered message may be consumed
  Fifo,       // only the oldest message of each receiver may be consumed
};

enum class KeyMode {
  On,        // receive matches (line, token)
  NoTokens,  // receive matches the line only
  Off,       // receive matches any data message from its sender
};

struct NetOptions {
  DelayMode delay = DelayMode::Strict;
  Transport transport = Transport::Unordered;
  KeyMode keys = KeyMode::On;
};

struct NetConfiguration {
  Network N;
  StateMap sigma;
  MessageMap K;

  bool operator==(const NetConfiguration&) const = default;
};

NetConfiguration initial_net(const ProjectedProgram& projected, const StateMap& sigma = {});

std::vector<TransitionCandidate> enabled_net(const NetConfiguration& cfg, const ProcDeclarations& decls,
                                             const NetOptions& opts = {});

/// Candidates of a single process.
std::vector<TransitionCandidate> enabled_at(const NetConfiguration& cfg, const std::string& q,
                                            const ProcDeclarations& decls, const NetOptions& opts = {});

struct NetStep {
  NetConfiguration cfg;
  std::optional<Value> message;
};

NetStep step_net(const NetConfiguration& cfg, const TransitionCandidate& cand, const ProcDeclarations& decls,
                 const NetOptions& opts = {}, const BuiltinRegistry& builtins = default_builtins());

NetConfiguration apply_net(const NetConfiguration& cfg, const TransitionCandidate& cand, const ProcDeclarations& decls,
                           const NetOptions& opts = {}, const BuiltinRegistry& builtins = default_builtins());

Trace run_net(const NetConfiguration& cfg, const ProcDeclarations& decls, const Scheduler& scheduler, std::size_t bound,
              const NetOptions& opts = {}, NetConfiguration* final_cfg = nullptr,
              const BuiltinRegistry& builtins = default_builtins());

bool is_terminated(const Network& n);

std::string canonical(const NetConfiguration& cfg);
std::uint64_t state_hash(const NetConfiguration& cfg);

}  // namespace o3
