#pragma once

#include <optional>
#include <string>
#include <vector>

#include "o3/errors.hpp"
#include "o3/syntax.hpp"

namespace o3 {

enum class ProjectionReason {
  UnmergeableBranches,
  LabelCollision,
  MissingSelection,    // a non-deciding role would act before learning the branch
  NonLocalExpression,  // expression mentions another process
  SelfCommunication,
};

std::string to_string(ProjectionReason r);

class ProjectionError : public Error {
 public:
  ProjectionError(std::string role, std::optional<IntegrityKey> key, ProjectionReason reason, const std::string& detail);

  const std::string& role() const { return role_; }
  const std::optional<IntegrityKey>& key() const { return key_; }
  ProjectionReason reason() const { return reason_; }

 private:
  std::string role_;
  std::optional<IntegrityKey> key_;
  ProjectionReason reason_;
};

/// Local procedure name for role `role` of choreographic procedure `procedure`.
std::string mangle(const std::string& procedure, const std::string& role);

/// ⟦C⟧_r. Declarations are consulted only to name the projected procedures;
/// calls to unknown procedures fall back to positional names.
ProcessBehavior project_role(const Choreography& c, const std::string& r,
                             const std::vector<ProcedureDecl>& decls = {});

/// ⟦e⟧_r; throws NonLocalExpression if an atom lives elsewhere.
Expr project_expr(const Expr& e, const std::string& r);

struct ProjectedProgram {
  ProcDeclarations decls;
  Network network;
};

ProcProcedureDecl project_decl(const ProcedureDecl& decl, std::size_t role_index,
                               const std::vector<ProcedureDecl>& decls = {});
ProjectedProgram project_program(const Program& prog);

/// Projection of a whole choreography over the given processes.
Network project_network(const Choreography& c, const std::vector<std::string>& procs,
                        const std::vector<ProcedureDecl>& decls = {});

/// P ⊔ Q, or nullopt where undefined.
std::optional<ProcessBehavior> merge(const ProcessBehavior& p, const ProcessBehavior& q);

/// P ⊒ Q, compared on normalized terms.
bool branch_geq(const ProcessBehavior& p, const ProcessBehavior& q);

/// Pointwise ⊒; processes missing on either side count as 0.
bool network_geq(const Network& n, const Network& m);

/// Keys of comm-in-progress terms targeting q, then keys of comms targeting q.
std::vector<KeyAnnot> keys_q(const Choreography& c, const std::string& q);

}  // namespace o3
