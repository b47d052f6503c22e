#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "o3/token.hpp"
#include "o3/value.hpp"

namespace o3 {

/// Expression tree shared by choreographies and processes.
///
/// Choreography atoms carry the process they are located at (`v@p`, `p.x`);
/// process-level atoms leave `proc` empty.
struct Expr {
  enum class Kind : unsigned char { Val, Var, App };

  Kind kind = Kind::Val;
  Value value;
  std::string proc;
  std::string name;
  std::vector<Expr> args;

  static Expr val(Value v, std::string proc = {});
  static Expr var(std::string proc, std::string name);
  static Expr local_var(std::string name) { return var({}, std::move(name)); }
  static Expr app(std::string fn, std::vector<Expr> args);

  bool is_val() const { return kind == Kind::Val; }
  bool is_var() const { return kind == Kind::Var; }
  bool is_app() const { return kind == Kind::App; }

  bool operator==(const Expr&) const = default;
};

/// A variable `p.x` at a given process.
struct LocatedVar {
  std::string proc;
  std::string name;

  auto operator<=>(const LocatedVar&) const = default;
  std::string to_string() const { return proc + "." + name; }
};

// ---------------------------------------------------------------------------
// Choreographies

struct ChorInstr;
using Choreography = std::vector<ChorInstr>;

namespace chor {

struct Comm {
  std::string from;
  Expr expr;
  std::string to;
  std::string var;
  bool operator==(const Comm&) const = default;
};

struct CommInProgress {
  std::string from;
  std::string to;
  std::string var;
  bool operator==(const CommInProgress&) const = default;
};

struct Select {
  std::string from;
  std::string to;
  std::string label;
  bool operator==(const Select&) const = default;
};

struct SelectInProgress {
  std::string from;
  std::string to;
  std::string label;
  bool operator==(const SelectInProgress&) const = default;
};

struct Compute {
  std::string var;
  std::string proc;
  Expr expr;
  bool operator==(const Compute&) const = default;
};

struct Cond {
  Expr guard;
  std::string proc;
  Choreography then_branch;
  Choreography else_branch;
  bool operator==(const Cond&) const = default;
};

struct Call {
  std::string procedure;
  std::vector<std::string> roles;
  std::vector<Expr> args;
  bool operator==(const Call&) const = default;
};

struct CallInProgress {
  std::vector<std::string> pending;
  std::string procedure;
  std::vector<std::string> roles;
  std::vector<Expr> args;
  Choreography body;
  bool operator==(const CallInProgress&) const = default;
};

struct Block {
  Choreography body;
  bool operator==(const Block&) const = default;
};

}  // namespace chor

struct ChorInstr {
  using Payload = std::variant<chor::Comm, chor::CommInProgress, chor::Select, chor::SelectInProgress,
                               chor::Compute, chor::Cond, chor::Call, chor::CallInProgress, chor::Block>;

  int line = 0;  // unused for blocks
  TokenExpr token = Placeholder{};
  Payload payload;

  ChorInstr() = default;
  ChorInstr(int l, TokenExpr t, Payload p) : line(l), token(std::move(t)), payload(std::move(p)) {}
  static ChorInstr block(Choreography body) { return ChorInstr(0, Token{}, chor::Block{std::move(body)}); }

  template <class T>
  bool is() const { return std::holds_alternative<T>(payload); }
  template <class T>
  const T& as() const { return std::get<T>(payload); }
  template <class T>
  T& as() { return std::get<T>(payload); }

  bool is_block() const { return is<chor::Block>(); }
  bool has_key() const { return !is_block(); }
  bool is_runtime() const {
    return is<chor::CommInProgress>() || is<chor::SelectInProgress>() || is<chor::CallInProgress>();
  }
  /// Selection or selection-in-progress whose receiver is `q`.
  bool is_selection_at(const std::string& q) const;
  IntegrityKey key() const { return IntegrityKey{line, concrete(token)}; }

  bool operator==(const ChorInstr&) const = default;
};

struct ProcedureDecl {
  std::string name;
  std::vector<std::string> roles;
  std::vector<LocatedVar> params;
  Choreography body;
  bool operator==(const ProcedureDecl&) const = default;
};

struct Program {
  std::string name;
  std::vector<ProcedureDecl> decls;
  Choreography main;
  std::set<std::string> labels;

  const ProcedureDecl* find(const std::string& procedure) const;
  bool operator==(const Program&) const = default;
};

// ---------------------------------------------------------------------------
// Processes

struct ProcInstr;
using ProcessBehavior = std::vector<ProcInstr>;

namespace local {

struct Send {
  std::string to;
  int line = 0;
  TokenExpr token;
  Expr expr;
  bool operator==(const Send&) const = default;
};

/// Receive. `sender` is derived by projection and is consulted only by the
/// keyless legacy transport; keyed delivery never looks at it.
struct Recv {
  std::string var;
  int line = 0;
  TokenExpr token;
  std::string sender;
  bool operator==(const Recv&) const = default;
};

struct Set {
  std::string var;
  Expr expr;
  bool operator==(const Set&) const = default;
};

struct Choose {
  std::string to;
  int line = 0;
  TokenExpr token;
  std::string label;
  bool operator==(const Choose&) const = default;
};

struct BranchOption {
  int line = 0;
  TokenExpr token;
  std::string label;
  ProcessBehavior body;
  bool operator==(const BranchOption&) const = default;
};

/// Options are kept sorted by (line, token, label).
struct Branch {
  std::vector<BranchOption> options;
  bool operator==(const Branch&) const = default;
};

struct If {
  Expr guard;
  ProcessBehavior then_branch;
  ProcessBehavior else_branch;
  bool operator==(const If&) const = default;
};

struct Call {
  std::string procedure;
  std::vector<std::string> procs;
  std::vector<Expr> args;
  int line = 0;
  TokenExpr token;
  bool operator==(const Call&) const = default;
};

struct Block {
  ProcessBehavior body;
  bool operator==(const Block&) const = default;
};

}  // namespace local

struct ProcInstr {
  using Payload = std::variant<local::Send, local::Recv, local::Set, local::Choose, local::Branch, local::If,
                               local::Call, local::Block>;
  Payload payload;

  ProcInstr() = default;
  template <class T>
    requires std::is_constructible_v<Payload, T> && (!std::is_same_v<std::remove_cvref_t<T>, ProcInstr>)
  ProcInstr(T&& p) : payload(std::forward<T>(p)) {}  // NOLINT(google-explicit-constructor)

  template <class T>
  bool is() const { return std::holds_alternative<T>(payload); }
  template <class T>
  const T& as() const { return std::get<T>(payload); }
  template <class T>
  T& as() { return std::get<T>(payload); }

  bool operator==(const ProcInstr&) const = default;
};

using Network = std::map<std::string, ProcessBehavior>;

struct ProcProcedureDecl {
  std::string name;                 // mangled, e.g. BuyItem__s
  std::vector<std::string> roles;   // the other roles, in declaration order
  std::vector<std::string> params;  // value parameters located at this role
  ProcessBehavior body;
  bool operator==(const ProcProcedureDecl&) const = default;
};

using ProcDeclarations = std::map<std::string, ProcProcedureDecl>;

// ---------------------------------------------------------------------------
// Auxiliary functions

std::set<std::string> pn(const Expr& e);
std::set<std::string> pn(const ChorInstr& i);
std::set<std::string> pn(const Choreography& c);

std::set<LocatedVar> fv(const Expr& e);
std::set<LocatedVar> fv(const Choreography& c);
std::set<std::string> fv_proc(const ProcessBehavior& p);

/// Flattened instruction list: recurses into blocks, both conditional
/// branches and call-in-progress bodies. Blocks themselves are skipped.
std::vector<const ChorInstr*> stats(const Choreography& c);

struct KeyAnnot {
  int line = 0;
  TokenExpr token;
  auto operator<=>(const KeyAnnot&) const = default;
};

std::vector<KeyAnnot> keys_chor(const Choreography& c);
std::vector<KeyAnnot> keys_proc(const ProcessBehavior& p);

bool contains_runtime_terms(const Choreography& c);
bool closed(const Expr& e);

/// {I; C1} ⨟ C = {I; C1}; C  and  {0} ⨟ C = C
Choreography concat_block(Choreography block_body, Choreography continuation);
ProcessBehavior concat_block(ProcessBehavior block_body, ProcessBehavior continuation);

/// Sequential composition: replaces the terminating 0 of `first`.
ProcessBehavior append(ProcessBehavior first, const ProcessBehavior& second);

Expr substitute(const Expr& e, const LocatedVar& var, const Expr& replacement);
Choreography substitute(const Choreography& c, const LocatedVar& var, const Value& v);
Expr substitute_local(const Expr& e, const std::string& var, const Value& v);
ProcessBehavior substitute_proc(const ProcessBehavior& p, const std::string& var, const Value& v);

/// Simultaneous renaming of process names.
Choreography rename_roles(const Choreography& c, const std::map<std::string, std::string>& renaming);
ProcessBehavior rename_roles(const ProcessBehavior& p, const std::map<std::string, std::string>& renaming);

Choreography fill_token(const Choreography& c, const Token& token);
ProcessBehavior fill_token(const ProcessBehavior& p, const Token& token);

/// Body of `decl` with roles renamed, parameters replaced by `args` and every
/// placeholder token replaced by `token`. Line numbers are kept.
Choreography instantiate_procedure(const ProcedureDecl& decl, const std::vector<std::string>& roles,
                                   const std::vector<Expr>& args, const Token& token);
ProcessBehavior instantiate_procedure(const ProcProcedureDecl& decl, const std::vector<std::string>& procs,
                                      const std::vector<Expr>& args, const Token& token);

/// Garbage-collects empty blocks and flattens blocks in tail position.
/// Neither changes behaviour: a trailing block has no continuation to scope.
Choreography normalize(const Choreography& c);
ProcessBehavior normalize(const ProcessBehavior& p);

/// C ≡ 0 up to empty blocks.
bool is_terminated(const Choreography& c);
bool is_terminated(const ProcessBehavior& p);

}  // namespace o3
