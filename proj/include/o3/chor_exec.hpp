#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "o3/eval.hpp"
#include "o3/syntax.hpp"

namespace o3 {

/// Undelivered message (l, τ, v). `sender` is bookkeeping for the keyless
/// legacy transport and for traces; keyed delivery ignores it.
struct Message {
  int line = 0;
  Token token;
  Value payload;
  std::string sender;

  IntegrityKey key() const { return {line, token}; }
  auto operator<=>(const Message&) const = default;
};

/// Multiset of messages, kept in arrival order (the FIFO transport relies on it).
using MessageBag = std::vector<Message>;

using StateMap = std::map<std::string, ProcState>;
using MessageMap = std::map<std::string, MessageBag>;

struct ChorConfiguration {
  Choreography C;
  StateMap sigma;
  MessageMap K;

  bool operator==(const ChorConfiguration&) const = default;
};

/// One rule instance. `path` addresses the instruction: every index but the
/// last steps into a block or call-in-progress body.
struct TransitionCandidate {
  std::string rule;
  std::string actor;
  IntegrityKey key;
  std::vector<std::size_t> path;
  std::vector<std::string> framing;  // C-Delay / C-Block / C-Delay-Proc, or P-Delay / P-Block
  std::optional<std::size_t> message;  // index into K(actor) for receives
  std::optional<std::size_t> option;   // chosen branch option (P-OnSelect)
  std::optional<Value> payload;        // payload consumed by a receive, if known up front

  bool operator==(const TransitionCandidate&) const = default;
};

/// Initial configuration: Σ from `sigma` (missing processes get a fresh
/// state), K empty for every process of the choreography.
ChorConfiguration initial_configuration(const Program& prog, const StateMap& sigma = {});

std::vector<TransitionCandidate> enabled(const ChorConfiguration& cfg, const Program& prog);

/// Applies `cand`; throws IllegalTransition if it is not enabled.
ChorConfiguration apply(const ChorConfiguration& cfg, const TransitionCandidate& cand, const Program& prog,
                        const BuiltinRegistry& builtins = default_builtins());

/// Result of a step together with the payload it moved (sent, received or
/// selected), if any.
struct ChorStep {
  ChorConfiguration cfg;
  std::optional<Value> message;
};

ChorStep step(const ChorConfiguration& cfg, const TransitionCandidate& cand, const Program& prog,
              const BuiltinRegistry& builtins = default_builtins());

struct StepRecord {
  std::string rule;
  std::string actor;
  IntegrityKey key;
  std::optional<Value> message;
  std::uint64_t state_hash = 0;
};

struct Trace {
  std::vector<StepRecord> steps;
  bool terminated = false;  // reached C ≡ 0 (or a network of 0s)
  bool stuck = false;       // no enabled transition but not terminated
};

enum class SchedulePolicy { InOrder, Random, List };

struct Scheduler {
  SchedulePolicy policy = SchedulePolicy::Random;
  std::uint64_t seed = 0;
  std::vector<std::size_t> choices;  // used by SchedulePolicy::List
};

Trace run(const ChorConfiguration& cfg, const Program& prog, const Scheduler& scheduler, std::size_t bound,
          ChorConfiguration* final_cfg = nullptr, const BuiltinRegistry& builtins = default_builtins());

/// Picks the index of the next candidate; shared by both executors.
class Picker {
 public:
  explicit Picker(const Scheduler& s);
  std::optional<std::size_t> pick(std::size_t n_candidates);

 private:
  Scheduler scheduler_;
  std::uint64_t state_;
  std::size_t cursor_ = 0;
};

}  // namespace o3
