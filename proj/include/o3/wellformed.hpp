#pragma once

#include <string>
#include <vector>

#include "o3/chor_exec.hpp"
#include "o3/syntax.hpp"

namespace o3 {

struct WfViolation {
  std::string rule;   // e.g. "C-WF-Recv"
  std::string where;  // offending key, declaration or process
  std::string message;

  bool operator==(const WfViolation&) const = default;
};

struct WfReport {
  std::vector<WfViolation> violations;

  bool ok() const { return violations.empty(); }
  void add(std::string rule, std::string where, std::string message);
  void append(const WfReport& other);
  bool cites(const std::string& rule) const;
};

/// C-WF-Def.
WfReport check_decl(const ProcedureDecl& decl, const Program& prog);

/// Per-instruction rule (C-WF-Send, C-WF-Recv, ..., C-WF-Calling).
WfReport check_instr(const ChorInstr& instr, const MessageMap& K, const Program& prog);

/// C-WF over a configuration. `include_decls` re-checks every declaration;
/// explorers that already checked the program once pass false.
WfReport check_config(const ChorConfiguration& cfg, const Program& prog, bool include_decls = true);

/// Static checks on a parsed program: every declaration plus the initial
/// configuration with fresh state for each process.
WfReport check_program(const Program& prog);

/// keys(P) distinct for each process.
WfReport check_network(const Network& n);

}  // namespace o3
