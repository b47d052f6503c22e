#include "o3/epp.hpp"

#include <algorithm>
#include <tuple>

namespace o3 {

std::string to_string(ProjectionReason r) {
  switch (r) {
    case ProjectionReason::UnmergeableBranches: return "UnmergeableBranches";
    case ProjectionReason::LabelCollision: return "LabelCollision";
    case ProjectionReason::MissingSelection: return "MissingSelection";
    case ProjectionReason::NonLocalExpression: return "NonLocalExpression";
    case ProjectionReason::SelfCommunication: return "SelfCommunication";
  }
  return "?";
}

ProjectionError::ProjectionError(std::string role, std::optional<IntegrityKey> key, ProjectionReason reason,
                                 const std::string& detail)
    : Error("ProjectionError", to_string(reason) + " at role '" + role + "'" +
                                   (key ? " key " + key->to_string() : std::string()) + ": " + detail),
      role_(std::move(role)),
      key_(std::move(key)),
      reason_(reason) {}

std::string mangle(const std::string& procedure, const std::string& role) { return procedure + "__" + role; }

namespace {

// Signals an undefined merge; converted to ProjectionError by the caller.
struct MergeFailure {
  ProjectionReason reason;
  std::string detail;
};

ProcessBehavior merge_seq(const ProcessBehavior& p, const ProcessBehavior& q);

bool option_less(const local::BranchOption& a, const local::BranchOption& b) {
  return std::tie(a.line, a.token, a.label) < std::tie(b.line, b.token, b.label);
}

ProcInstr merge_instr(const ProcInstr& a, const ProcInstr& b) {
  if (a == b) return a;
  if (a.is<local::Branch>() && b.is<local::Branch>()) {
    local::Branch out = a.as<local::Branch>();
    for (const auto& o : b.as<local::Branch>().options) {
      auto same = std::find_if(out.options.begin(), out.options.end(),
                               [&](const local::BranchOption& x) { return x.label == o.label; });
      if (same == out.options.end()) {
        out.options.push_back(o);
        continue;
      }
      if (same->line != o.line || same->token != o.token)
        throw MergeFailure{ProjectionReason::LabelCollision, "label " + o.label + " offered under two keys"};
      same->body = merge_seq(same->body, o.body);
    }
    std::sort(out.options.begin(), out.options.end(), option_less);
    return out;
  }
  if (a.is<local::If>() && b.is<local::If>()) {
    const auto& x = a.as<local::If>();
    const auto& y = b.as<local::If>();
    if (!(x.guard == y.guard)) throw MergeFailure{ProjectionReason::UnmergeableBranches, "conditionals differ"};
    return local::If{x.guard, merge_seq(x.then_branch, y.then_branch), merge_seq(x.else_branch, y.else_branch)};
  }
  if (a.is<local::Block>() && b.is<local::Block>())
    return local::Block{merge_seq(a.as<local::Block>().body, b.as<local::Block>().body)};
  throw MergeFailure{ProjectionReason::UnmergeableBranches, "branches behave differently"};
}

ProcessBehavior merge_seq(const ProcessBehavior& p, const ProcessBehavior& q) {
  if (p.size() != q.size()) throw MergeFailure{ProjectionReason::UnmergeableBranches, "branches differ in length"};
  ProcessBehavior out;
  out.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back(merge_instr(p[i], q[i]));
  return out;
}

std::string decl_role_name(const std::vector<ProcedureDecl>& decls, const std::string& procedure, std::size_t j) {
  for (const auto& d : decls)
    if (d.name == procedure && j < d.roles.size()) return d.roles[j];
  return std::to_string(j + 1);
}

class Projector {
 public:
  Projector(std::string role, const std::vector<ProcedureDecl>& decls) : r_(std::move(role)), decls_(decls) {}

  ProcessBehavior seq(const Choreography& c, std::size_t i) {
    if (i == c.size()) return {};
    const ChorInstr& instr = c[i];
    const auto& payload = instr.payload;

    if (const auto* s = std::get_if<chor::Block>(&payload)) return concat_block(seq(s->body, 0), seq(c, i + 1));

    const IntegrityKey key{instr.line, is_placeholder(instr.token) ? Token{} : std::get<Token>(instr.token)};
    auto fail = [&](ProjectionReason reason, const std::string& detail) -> ProjectionError {
      return ProjectionError(r_, key, reason, detail);
    };

    if (const auto* s = std::get_if<chor::Comm>(&payload)) {
      if (s->from == s->to && s->from == r_) throw fail(ProjectionReason::SelfCommunication, s->from + " sends to itself");
      if (r_ == s->from) return cons(local::Send{s->to, instr.line, instr.token, expr(s->expr, key)}, c, i);
      if (r_ == s->to) return cons(local::Recv{s->var, instr.line, instr.token, s->from}, c, i);
      return seq(c, i + 1);
    }
    if (const auto* s = std::get_if<chor::CommInProgress>(&payload)) {
      if (r_ == s->to) return cons(local::Recv{s->var, instr.line, instr.token, s->from}, c, i);
      return seq(c, i + 1);
    }
    if (const auto* s = std::get_if<chor::Compute>(&payload)) {
      if (r_ == s->proc) return cons(local::Set{s->var, expr(s->expr, key)}, c, i);
      return seq(c, i + 1);
    }
    if (const auto* s = std::get_if<chor::Select>(&payload)) {
      if (s->from == s->to && s->from == r_) throw fail(ProjectionReason::SelfCommunication, s->from + " selects at itself");
      if (r_ == s->from) return cons(local::Choose{s->to, instr.line, instr.token, s->label}, c, i);
      if (r_ == s->to) return branch(instr.line, instr.token, s->label, c, i);
      return seq(c, i + 1);
    }
    if (const auto* s = std::get_if<chor::SelectInProgress>(&payload)) {
      if (r_ == s->to) return branch(instr.line, instr.token, s->label, c, i);
      return seq(c, i + 1);
    }
    if (const auto* s = std::get_if<chor::Cond>(&payload)) {
      if (r_ == s->proc)
        return cons(local::If{expr(s->guard, key), seq(s->then_branch, 0), seq(s->else_branch, 0)}, c, i);
      const auto involved = [&] {
        auto out = pn(s->then_branch);
        out.merge(pn(s->else_branch));
        return out.count(r_) != 0;
      }();
      if (!involved) return seq(c, i + 1);
      ProcessBehavior merged;
      try {
        merged = merge_seq(seq(s->then_branch, 0), seq(s->else_branch, 0));
      } catch (const MergeFailure& m) {
        throw fail(m.reason, m.detail);
      }
      const auto shape = normalize(merged);
      if (shape.size() != 1 || !shape.front().is<local::Branch>())
        throw fail(ProjectionReason::MissingSelection, "role is not informed of the decision taken by " + s->proc);
      return concat_block(std::move(merged), seq(c, i + 1));
    }
    if (const auto* s = std::get_if<chor::Call>(&payload)) {
      for (std::size_t j = 0; j < s->roles.size(); ++j)
        if (s->roles[j] == r_) return cons(call(s->procedure, s->roles, s->args, j, instr, key), c, i);
      return seq(c, i + 1);
    }
    if (const auto* s = std::get_if<chor::CallInProgress>(&payload)) {
      for (std::size_t j = 0; j < s->roles.size(); ++j) {
        if (s->roles[j] != r_) continue;
        if (std::find(s->pending.begin(), s->pending.end(), r_) != s->pending.end())
          return cons(call(s->procedure, s->roles, s->args, j, instr, key), c, i);
        return concat_block(seq(s->body, 0), seq(c, i + 1));
      }
      return seq(c, i + 1);
    }
    return seq(c, i + 1);
  }

 private:
  ProcessBehavior cons(ProcInstr head, const Choreography& c, std::size_t i) {
    ProcessBehavior rest = seq(c, i + 1);
    rest.insert(rest.begin(), std::move(head));
    return rest;
  }

  ProcessBehavior branch(int line, const TokenExpr& token, const std::string& label, const Choreography& c,
                         std::size_t i) {
    local::Branch b;
    b.options.push_back(local::BranchOption{line, token, label, seq(c, i + 1)});
    return {ProcInstr(std::move(b))};
  }

  Expr expr(const Expr& e, const IntegrityKey& key) {
    try {
      return project_expr(e, r_);
    } catch (const ProjectionError&) {
      throw ProjectionError(r_, key, ProjectionReason::NonLocalExpression,
                            "expression mentions a process other than " + r_);
    }
  }

  local::Call call(const std::string& procedure, const std::vector<std::string>& roles, const std::vector<Expr>& args,
                   std::size_t j, const ChorInstr& instr, const IntegrityKey& key) {
    local::Call out;
    out.procedure = mangle(procedure, decl_role_name(decls_, procedure, j));
    for (std::size_t k = 0; k < roles.size(); ++k)
      if (k != j) out.procs.push_back(roles[k]);
    for (const auto& a : args) {
      const auto where = pn(a);
      if (where.size() == 1 && *where.begin() == r_) out.args.push_back(expr(a, key));
    }
    out.line = instr.line;
    out.token = instr.token;
    return out;
  }

  std::string r_;
  const std::vector<ProcedureDecl>& decls_;
};

}  // namespace

Expr project_expr(const Expr& e, const std::string& r) {
  if (e.is_app()) {
    Expr out = e;
    for (auto& a : out.args) a = project_expr(a, r);
    return out;
  }
  if (e.proc != r)
    throw ProjectionError(r, std::nullopt, ProjectionReason::NonLocalExpression,
                          "atom located at '" + e.proc + "'");
  Expr out = e;
  out.proc.clear();
  return out;
}

ProcessBehavior project_role(const Choreography& c, const std::string& r, const std::vector<ProcedureDecl>& decls) {
  return Projector(r, decls).seq(c, 0);
}

ProcProcedureDecl project_decl(const ProcedureDecl& decl, std::size_t role_index,
                               const std::vector<ProcedureDecl>& decls) {
  ProcProcedureDecl out;
  const std::string& role = decl.roles.at(role_index);
  out.name = mangle(decl.name, role);
  for (std::size_t k = 0; k < decl.roles.size(); ++k)
    if (k != role_index) out.roles.push_back(decl.roles[k]);
  for (const auto& p : decl.params)
    if (p.proc == role) out.params.push_back(p.name);
  out.body = project_role(decl.body, role, decls);
  return out;
}

ProjectedProgram project_program(const Program& prog) {
  ProjectedProgram out;
  for (const auto& d : prog.decls) {
    for (std::size_t j = 0; j < d.roles.size(); ++j) {
      auto pd = project_decl(d, j, prog.decls);
      out.decls.emplace(pd.name, std::move(pd));
    }
  }
  const auto procs = pn(prog.main);
  out.network = project_network(prog.main, {procs.begin(), procs.end()}, prog.decls);
  return out;
}

Network project_network(const Choreography& c, const std::vector<std::string>& procs,
                        const std::vector<ProcedureDecl>& decls) {
  Network n;
  for (const auto& p : procs) n[p] = project_role(c, p, decls);
  return n;
}

std::optional<ProcessBehavior> merge(const ProcessBehavior& p, const ProcessBehavior& q) {
  try {
    return merge_seq(p, q);
  } catch (const MergeFailure&) {
    return std::nullopt;
  }
}

namespace {

bool geq_seq(const ProcessBehavior& p, const ProcessBehavior& q);

bool geq_instr(const ProcInstr& a, const ProcInstr& b) {
  if (a == b) return true;
  if (a.is<local::Branch>() && b.is<local::Branch>()) {
    const auto& big = a.as<local::Branch>().options;
    for (const auto& o : b.as<local::Branch>().options) {
      auto it = std::find_if(big.begin(), big.end(), [&](const local::BranchOption& x) {
        return x.line == o.line && x.token == o.token && x.label == o.label;
      });
      if (it == big.end() || !geq_seq(it->body, o.body)) return false;
    }
    return true;
  }
  if (a.is<local::If>() && b.is<local::If>()) {
    const auto& x = a.as<local::If>();
    const auto& y = b.as<local::If>();
    return x.guard == y.guard && geq_seq(x.then_branch, y.then_branch) && geq_seq(x.else_branch, y.else_branch);
  }
  if (a.is<local::Block>() && b.is<local::Block>())
    return geq_seq(a.as<local::Block>().body, b.as<local::Block>().body);
  return false;
}

bool geq_seq(const ProcessBehavior& p, const ProcessBehavior& q) {
  if (p.size() != q.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!geq_instr(p[i], q[i])) return false;
  return true;
}

bool is_normal(const ProcessBehavior& p) {
  if (!p.empty() && p.back().is<local::Block>()) return false;
  for (const auto& i : p) {
    if (const auto* b = std::get_if<local::Block>(&i.payload)) {
      if (b->body.empty() || !is_normal(b->body)) return false;
    } else if (const auto* x = std::get_if<local::If>(&i.payload)) {
      if (!is_normal(x->then_branch) || !is_normal(x->else_branch)) return false;
    } else if (const auto* x = std::get_if<local::Branch>(&i.payload)) {
      for (const auto& o : x->options)
        if (!is_normal(o.body)) return false;
    }
  }
  return true;
}

}  // namespace

bool branch_geq(const ProcessBehavior& p, const ProcessBehavior& q) {
  if (is_normal(p) && is_normal(q)) return geq_seq(p, q);
  return geq_seq(normalize(p), normalize(q));
}

bool network_geq(const Network& n, const Network& m) {
  static const ProcessBehavior empty;
  auto get = [](const Network& net, const std::string& k) -> const ProcessBehavior& {
    auto it = net.find(k);
    return it == net.end() ? empty : it->second;
  };
  for (const auto& [k, v] : n)
    if (!branch_geq(v, get(m, k))) return false;
  for (const auto& [k, v] : m)
    if (n.count(k) == 0 && !branch_geq(empty, v)) return false;
  return true;
}

std::vector<KeyAnnot> keys_q(const Choreography& c, const std::string& q) {
  std::vector<KeyAnnot> out;
  const auto s = stats(c);
  for (const auto* i : s)
    if (const auto* x = std::get_if<chor::CommInProgress>(&i->payload); x && x->to == q)
      out.push_back({i->line, i->token});
  for (const auto* i : s)
    if (const auto* x = std::get_if<chor::Comm>(&i->payload); x && x->to == q) out.push_back({i->line, i->token});
  return out;
}

}  // namespace o3
