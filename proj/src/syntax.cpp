#include "o3/syntax.hpp"

#include <algorithm>

#include "o3/errors.hpp"

namespace o3 {

Expr Expr::val(Value v, std::string proc) {
  Expr e;
  e.kind = Kind::Val;
  e.value = std::move(v);
  e.proc = std::move(proc);
  return e;
}

Expr Expr::var(std::string proc, std::string name) {
  Expr e;
  e.kind = Kind::Var;
  e.proc = std::move(proc);
  e.name = std::move(name);
  return e;
}

Expr Expr::app(std::string fn, std::vector<Expr> args) {
  Expr e;
  e.kind = Kind::App;
  e.name = std::move(fn);
  e.args = std::move(args);
  return e;
}

bool ChorInstr::is_selection_at(const std::string& q) const {
  if (const auto* s = std::get_if<chor::Select>(&payload)) return s->to == q;
  if (const auto* s = std::get_if<chor::SelectInProgress>(&payload)) return s->to == q;
  return false;
}

const ProcedureDecl* Program::find(const std::string& procedure) const {
  for (const auto& d : decls)
    if (d.name == procedure) return &d;
  return nullptr;
}

// ---------------------------------------------------------------------------
// pn / fv

namespace {

void collect_pn(const Expr& e, std::set<std::string>& out) {
  if (e.is_app()) {
    for (const auto& a : e.args) collect_pn(a, out);
  } else if (!e.proc.empty()) {
    out.insert(e.proc);
  }
}

void collect_fv(const Expr& e, std::set<LocatedVar>& out) {
  if (e.is_var()) out.insert({e.proc, e.name});
  for (const auto& a : e.args) collect_fv(a, out);
}

std::set<LocatedVar> fv_from(const Choreography& c, std::size_t i);

std::set<LocatedVar> fv_instr(const ChorInstr& instr, std::set<LocatedVar> rest) {
  auto bind = [&rest](const std::string& p, const std::string& x) { rest.erase({p, x}); };
  std::set<LocatedVar> own;
  if (const auto* s = std::get_if<chor::Comm>(&instr.payload)) {
    bind(s->to, s->var);
    collect_fv(s->expr, own);
  } else if (const auto* s = std::get_if<chor::CommInProgress>(&instr.payload)) {
    bind(s->to, s->var);
  } else if (const auto* s = std::get_if<chor::Compute>(&instr.payload)) {
    bind(s->proc, s->var);
    collect_fv(s->expr, own);
  } else if (const auto* s = std::get_if<chor::Cond>(&instr.payload)) {
    collect_fv(s->guard, own);
    own.merge(fv(s->then_branch));
    own.merge(fv(s->else_branch));
  } else if (const auto* s = std::get_if<chor::Call>(&instr.payload)) {
    for (const auto& a : s->args) collect_fv(a, own);
  } else if (const auto* s = std::get_if<chor::CallInProgress>(&instr.payload)) {
    for (const auto& a : s->args) collect_fv(a, own);
    own.merge(fv(s->body));
  } else if (const auto* s = std::get_if<chor::Block>(&instr.payload)) {
    own.merge(fv(s->body));
  }
  rest.merge(own);
  return rest;
}

std::set<LocatedVar> fv_from(const Choreography& c, std::size_t i) {
  if (i == c.size()) return {};
  return fv_instr(c[i], fv_from(c, i + 1));
}

void collect_local_fv(const Expr& e, std::set<std::string>& out) {
  if (e.is_var()) out.insert(e.name);
  for (const auto& a : e.args) collect_local_fv(a, out);
}

std::set<std::string> fv_proc_from(const ProcessBehavior& p, std::size_t i) {
  if (i == p.size()) return {};
  auto rest = fv_proc_from(p, i + 1);
  std::set<std::string> own;
  const auto& payload = p[i].payload;
  if (const auto* s = std::get_if<local::Send>(&payload)) {
    collect_local_fv(s->expr, own);
  } else if (const auto* s = std::get_if<local::Recv>(&payload)) {
    rest.erase(s->var);
  } else if (const auto* s = std::get_if<local::Set>(&payload)) {
    rest.erase(s->var);
    collect_local_fv(s->expr, own);
  } else if (const auto* s = std::get_if<local::Branch>(&payload)) {
    for (const auto& o : s->options) own.merge(fv_proc(o.body));
  } else if (const auto* s = std::get_if<local::If>(&payload)) {
    collect_local_fv(s->guard, own);
    own.merge(fv_proc(s->then_branch));
    own.merge(fv_proc(s->else_branch));
  } else if (const auto* s = std::get_if<local::Call>(&payload)) {
    for (const auto& a : s->args) collect_local_fv(a, own);
  } else if (const auto* s = std::get_if<local::Block>(&payload)) {
    own.merge(fv_proc(s->body));
  }
  rest.merge(own);
  return rest;
}

}  // namespace

std::set<std::string> pn(const Expr& e) {
  std::set<std::string> out;
  collect_pn(e, out);
  return out;
}

std::set<std::string> pn(const ChorInstr& i) {
  struct Visitor {
    std::set<std::string> operator()(const chor::Comm& s) const { return {s.from, s.to}; }
    std::set<std::string> operator()(const chor::CommInProgress& s) const { return {s.to}; }
    std::set<std::string> operator()(const chor::Select& s) const { return {s.from, s.to}; }
    std::set<std::string> operator()(const chor::SelectInProgress& s) const { return {s.to}; }
    std::set<std::string> operator()(const chor::Compute& s) const { return {s.proc}; }
    std::set<std::string> operator()(const chor::Cond& s) const {
      auto out = pn(s.then_branch);
      out.merge(pn(s.else_branch));
      out.insert(s.proc);
      return out;
    }
    std::set<std::string> operator()(const chor::Call& s) const { return {s.roles.begin(), s.roles.end()}; }
    std::set<std::string> operator()(const chor::CallInProgress& s) const {
      return {s.roles.begin(), s.roles.end()};
    }
    std::set<std::string> operator()(const chor::Block& s) const { return pn(s.body); }
  };
  return std::visit(Visitor{}, i.payload);
}

std::set<std::string> pn(const Choreography& c) {
  std::set<std::string> out;
  for (const auto& i : c) out.merge(pn(i));
  return out;
}

std::set<LocatedVar> fv(const Expr& e) {
  std::set<LocatedVar> out;
  collect_fv(e, out);
  return out;
}

std::set<LocatedVar> fv(const Choreography& c) { return fv_from(c, 0); }

std::set<std::string> fv_proc(const ProcessBehavior& p) { return fv_proc_from(p, 0); }

// ---------------------------------------------------------------------------
// stats / keys

namespace {

void collect_stats(const Choreography& c, std::vector<const ChorInstr*>& out) {
  for (const auto& i : c) {
    if (const auto* b = std::get_if<chor::Block>(&i.payload)) {
      collect_stats(b->body, out);
      continue;
    }
    out.push_back(&i);
    if (const auto* s = std::get_if<chor::Cond>(&i.payload)) {
      collect_stats(s->then_branch, out);
      collect_stats(s->else_branch, out);
    } else if (const auto* s = std::get_if<chor::CallInProgress>(&i.payload)) {
      collect_stats(s->body, out);
    }
  }
}

void collect_proc_keys(const ProcessBehavior& p, std::vector<KeyAnnot>& out) {
  for (const auto& i : p) {
    const auto& payload = i.payload;
    if (const auto* s = std::get_if<local::Send>(&payload)) {
      out.push_back({s->line, s->token});
    } else if (const auto* s = std::get_if<local::Recv>(&payload)) {
      out.push_back({s->line, s->token});
    } else if (const auto* s = std::get_if<local::Choose>(&payload)) {
      out.push_back({s->line, s->token});
    } else if (const auto* s = std::get_if<local::Call>(&payload)) {
      out.push_back({s->line, s->token});
    } else if (const auto* s = std::get_if<local::Branch>(&payload)) {
      for (const auto& o : s->options) out.push_back({o.line, o.token});
      for (const auto& o : s->options) collect_proc_keys(o.body, out);
    } else if (const auto* s = std::get_if<local::If>(&payload)) {
      collect_proc_keys(s->then_branch, out);
      collect_proc_keys(s->else_branch, out);
    } else if (const auto* s = std::get_if<local::Block>(&payload)) {
      collect_proc_keys(s->body, out);
    }
  }
}

}  // namespace

std::vector<const ChorInstr*> stats(const Choreography& c) {
  std::vector<const ChorInstr*> out;
  collect_stats(c, out);
  return out;
}

std::vector<KeyAnnot> keys_chor(const Choreography& c) {
  std::vector<KeyAnnot> out;
  for (const auto* i : stats(c)) out.push_back({i->line, i->token});
  return out;
}

std::vector<KeyAnnot> keys_proc(const ProcessBehavior& p) {
  std::vector<KeyAnnot> out;
  collect_proc_keys(p, out);
  return out;
}

bool contains_runtime_terms(const Choreography& c) {
  const auto s = stats(c);
  return std::any_of(s.begin(), s.end(), [](const ChorInstr* i) { return i->is_runtime(); });
}

bool closed(const Expr& e) {
  if (e.is_var()) return false;
  return std::all_of(e.args.begin(), e.args.end(), [](const Expr& a) { return closed(a); });
}

// ---------------------------------------------------------------------------
// Concatenation

Choreography concat_block(Choreography block_body, Choreography continuation) {
  if (is_terminated(block_body)) return continuation;
  Choreography out;
  out.reserve(continuation.size() + 1);
  out.push_back(ChorInstr::block(std::move(block_body)));
  std::move(continuation.begin(), continuation.end(), std::back_inserter(out));
  return out;
}

ProcessBehavior concat_block(ProcessBehavior block_body, ProcessBehavior continuation) {
  if (is_terminated(block_body)) return continuation;
  ProcessBehavior out;
  out.reserve(continuation.size() + 1);
  out.emplace_back(local::Block{std::move(block_body)});
  std::move(continuation.begin(), continuation.end(), std::back_inserter(out));
  return out;
}

ProcessBehavior append(ProcessBehavior first, const ProcessBehavior& second) {
  first.insert(first.end(), second.begin(), second.end());
  return first;
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

using ChorSubst = std::map<LocatedVar, Expr>;
using LocalSubst = std::map<std::string, Expr>;

Expr subst_expr(const Expr& e, const ChorSubst& s) {
  if (e.is_var()) {
    auto it = s.find({e.proc, e.name});
    return it == s.end() ? e : it->second;
  }
  if (!e.is_app()) return e;
  Expr out = e;
  for (auto& a : out.args) a = subst_expr(a, s);
  return out;
}

Choreography subst_chor(const Choreography& c, ChorSubst s) {
  Choreography out;
  out.reserve(c.size());
  for (const auto& instr : c) {
    if (s.empty()) {
      out.push_back(instr);
      continue;
    }
    ChorInstr j = instr;
    auto& payload = j.payload;
    if (auto* p = std::get_if<chor::Comm>(&payload)) {
      p->expr = subst_expr(p->expr, s);
      s.erase({p->to, p->var});
    } else if (auto* p = std::get_if<chor::CommInProgress>(&payload)) {
      s.erase({p->to, p->var});
    } else if (auto* p = std::get_if<chor::Compute>(&payload)) {
      p->expr = subst_expr(p->expr, s);
      s.erase({p->proc, p->var});
    } else if (auto* p = std::get_if<chor::Cond>(&payload)) {
      p->guard = subst_expr(p->guard, s);
      p->then_branch = subst_chor(p->then_branch, s);
      p->else_branch = subst_chor(p->else_branch, s);
    } else if (auto* p = std::get_if<chor::Call>(&payload)) {
      for (auto& a : p->args) a = subst_expr(a, s);
    } else if (auto* p = std::get_if<chor::CallInProgress>(&payload)) {
      for (auto& a : p->args) a = subst_expr(a, s);
      p->body = subst_chor(p->body, s);
    } else if (auto* p = std::get_if<chor::Block>(&payload)) {
      p->body = subst_chor(p->body, s);
    }
    out.push_back(std::move(j));
  }
  return out;
}

Expr subst_local_expr(const Expr& e, const LocalSubst& s) {
  if (e.is_var()) {
    auto it = s.find(e.name);
    return it == s.end() ? e : it->second;
  }
  if (!e.is_app()) return e;
  Expr out = e;
  for (auto& a : out.args) a = subst_local_expr(a, s);
  return out;
}

ProcessBehavior subst_proc(const ProcessBehavior& p, LocalSubst s) {
  ProcessBehavior out;
  out.reserve(p.size());
  for (const auto& instr : p) {
    if (s.empty()) {
      out.push_back(instr);
      continue;
    }
    ProcInstr j = instr;
    auto& payload = j.payload;
    if (auto* q = std::get_if<local::Send>(&payload)) {
      q->expr = subst_local_expr(q->expr, s);
    } else if (auto* q = std::get_if<local::Recv>(&payload)) {
      s.erase(q->var);
    } else if (auto* q = std::get_if<local::Set>(&payload)) {
      q->expr = subst_local_expr(q->expr, s);
      s.erase(q->var);
    } else if (auto* q = std::get_if<local::Branch>(&payload)) {
      for (auto& o : q->options) o.body = subst_proc(o.body, s);
    } else if (auto* q = std::get_if<local::If>(&payload)) {
      q->guard = subst_local_expr(q->guard, s);
      q->then_branch = subst_proc(q->then_branch, s);
      q->else_branch = subst_proc(q->else_branch, s);
    } else if (auto* q = std::get_if<local::Call>(&payload)) {
      for (auto& a : q->args) a = subst_local_expr(a, s);
    } else if (auto* q = std::get_if<local::Block>(&payload)) {
      q->body = subst_proc(q->body, s);
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace

Expr substitute(const Expr& e, const LocatedVar& var, const Expr& replacement) {
  return subst_expr(e, ChorSubst{{var, replacement}});
}

Choreography substitute(const Choreography& c, const LocatedVar& var, const Value& v) {
  return subst_chor(c, ChorSubst{{var, Expr::val(v, var.proc)}});
}

Expr substitute_local(const Expr& e, const std::string& var, const Value& v) {
  return subst_local_expr(e, LocalSubst{{var, Expr::val(v)}});
}

ProcessBehavior substitute_proc(const ProcessBehavior& p, const std::string& var, const Value& v) {
  return subst_proc(p, LocalSubst{{var, Expr::val(v)}});
}

// ---------------------------------------------------------------------------
// Renaming and tokens

namespace {

using Renaming = std::map<std::string, std::string>;

std::string ren(const Renaming& r, const std::string& s) {
  auto it = r.find(s);
  return it == r.end() ? s : it->second;
}

Expr rename_expr(const Expr& e, const Renaming& r) {
  Expr out = e;
  if (!out.proc.empty()) out.proc = ren(r, out.proc);
  for (auto& a : out.args) a = rename_expr(a, r);
  return out;
}

void fill(TokenExpr& t, const Token& token) {
  if (is_placeholder(t)) t = token;
}

}  // namespace

Choreography rename_roles(const Choreography& c, const Renaming& r) {
  Choreography out = c;
  for (auto& instr : out) {
    auto& payload = instr.payload;
    if (auto* p = std::get_if<chor::Comm>(&payload)) {
      p->from = ren(r, p->from);
      p->to = ren(r, p->to);
      p->expr = rename_expr(p->expr, r);
    } else if (auto* p = std::get_if<chor::CommInProgress>(&payload)) {
      p->from = ren(r, p->from);
      p->to = ren(r, p->to);
    } else if (auto* p = std::get_if<chor::Select>(&payload)) {
      p->from = ren(r, p->from);
      p->to = ren(r, p->to);
    } else if (auto* p = std::get_if<chor::SelectInProgress>(&payload)) {
      p->from = ren(r, p->from);
      p->to = ren(r, p->to);
    } else if (auto* p = std::get_if<chor::Compute>(&payload)) {
      p->proc = ren(r, p->proc);
      p->expr = rename_expr(p->expr, r);
    } else if (auto* p = std::get_if<chor::Cond>(&payload)) {
      p->proc = ren(r, p->proc);
      p->guard = rename_expr(p->guard, r);
      p->then_branch = rename_roles(p->then_branch, r);
      p->else_branch = rename_roles(p->else_branch, r);
    } else if (auto* p = std::get_if<chor::Call>(&payload)) {
      for (auto& x : p->roles) x = ren(r, x);
      for (auto& a : p->args) a = rename_expr(a, r);
    } else if (auto* p = std::get_if<chor::CallInProgress>(&payload)) {
      for (auto& x : p->pending) x = ren(r, x);
      for (auto& x : p->roles) x = ren(r, x);
      for (auto& a : p->args) a = rename_expr(a, r);
      p->body = rename_roles(p->body, r);
    } else if (auto* p = std::get_if<chor::Block>(&payload)) {
      p->body = rename_roles(p->body, r);
    }
  }
  return out;
}

ProcessBehavior rename_roles(const ProcessBehavior& p, const Renaming& r) {
  ProcessBehavior out = p;
  for (auto& instr : out) {
    auto& payload = instr.payload;
    if (auto* q = std::get_if<local::Send>(&payload)) {
      q->to = ren(r, q->to);
    } else if (auto* q = std::get_if<local::Recv>(&payload)) {
      q->sender = ren(r, q->sender);
    } else if (auto* q = std::get_if<local::Choose>(&payload)) {
      q->to = ren(r, q->to);
    } else if (auto* q = std::get_if<local::Branch>(&payload)) {
      for (auto& o : q->options) o.body = rename_roles(o.body, r);
    } else if (auto* q = std::get_if<local::If>(&payload)) {
      q->then_branch = rename_roles(q->then_branch, r);
      q->else_branch = rename_roles(q->else_branch, r);
    } else if (auto* q = std::get_if<local::Call>(&payload)) {
      for (auto& x : q->procs) x = ren(r, x);
    } else if (auto* q = std::get_if<local::Block>(&payload)) {
      q->body = rename_roles(q->body, r);
    }
  }
  return out;
}

Choreography fill_token(const Choreography& c, const Token& token) {
  Choreography out = c;
  for (auto& instr : out) {
    if (auto* b = std::get_if<chor::Block>(&instr.payload)) {
      b->body = fill_token(b->body, token);
      continue;
    }
    fill(instr.token, token);
    if (auto* p = std::get_if<chor::Cond>(&instr.payload)) {
      p->then_branch = fill_token(p->then_branch, token);
      p->else_branch = fill_token(p->else_branch, token);
    } else if (auto* p = std::get_if<chor::CallInProgress>(&instr.payload)) {
      p->body = fill_token(p->body, token);
    }
  }
  return out;
}

ProcessBehavior fill_token(const ProcessBehavior& p, const Token& token) {
  ProcessBehavior out = p;
  for (auto& instr : out) {
    auto& payload = instr.payload;
    if (auto* q = std::get_if<local::Send>(&payload)) {
      fill(q->token, token);
    } else if (auto* q = std::get_if<local::Recv>(&payload)) {
      fill(q->token, token);
    } else if (auto* q = std::get_if<local::Choose>(&payload)) {
      fill(q->token, token);
    } else if (auto* q = std::get_if<local::Call>(&payload)) {
      fill(q->token, token);
    } else if (auto* q = std::get_if<local::Branch>(&payload)) {
      for (auto& o : q->options) {
        fill(o.token, token);
        o.body = fill_token(o.body, token);
      }
    } else if (auto* q = std::get_if<local::If>(&payload)) {
      q->then_branch = fill_token(q->then_branch, token);
      q->else_branch = fill_token(q->else_branch, token);
    } else if (auto* q = std::get_if<local::Block>(&payload)) {
      q->body = fill_token(q->body, token);
    }
  }
  return out;
}

Choreography instantiate_procedure(const ProcedureDecl& decl, const std::vector<std::string>& roles,
                                   const std::vector<Expr>& args, const Token& token) {
  if (roles.size() != decl.roles.size())
    throw ArityMismatch(decl.name + " expects " + std::to_string(decl.roles.size()) + " roles, got " +
                        std::to_string(roles.size()));
  if (args.size() != decl.params.size())
    throw ArityMismatch(decl.name + " expects " + std::to_string(decl.params.size()) + " arguments, got " +
                        std::to_string(args.size()));
  Renaming renaming;
  for (std::size_t i = 0; i < roles.size(); ++i) renaming[decl.roles[i]] = roles[i];
  ChorSubst subst;
  for (std::size_t j = 0; j < args.size(); ++j) {
    const LocatedVar param{ren(renaming, decl.params[j].proc), decl.params[j].name};
    const Expr& a = args[j];
    if (a.is_app()) throw LocationMismatch("argument " + std::to_string(j + 1) + " of " + decl.name + " is not an atom");
    if (a.proc != param.proc)
      throw LocationMismatch("argument " + std::to_string(j + 1) + " of " + decl.name + " is located at '" + a.proc +
                             "' but its parameter lives at '" + param.proc + "'");
    subst.emplace(param, a);
  }
  return fill_token(subst_chor(rename_roles(decl.body, renaming), std::move(subst)), token);
}

ProcessBehavior instantiate_procedure(const ProcProcedureDecl& decl, const std::vector<std::string>& procs,
                                      const std::vector<Expr>& args, const Token& token) {
  if (procs.size() != decl.roles.size())
    throw ArityMismatch(decl.name + " expects " + std::to_string(decl.roles.size()) + " processes, got " +
                        std::to_string(procs.size()));
  if (args.size() != decl.params.size())
    throw ArityMismatch(decl.name + " expects " + std::to_string(decl.params.size()) + " arguments, got " +
                        std::to_string(args.size()));
  Renaming renaming;
  for (std::size_t i = 0; i < procs.size(); ++i) renaming[decl.roles[i]] = procs[i];
  LocalSubst subst;
  for (std::size_t j = 0; j < args.size(); ++j) subst.emplace(decl.params[j], args[j]);
  return fill_token(subst_proc(rename_roles(decl.body, renaming), std::move(subst)), token);
}

// ---------------------------------------------------------------------------
// Normalization

namespace {

template <class Seq, class BlockT, class F>
Seq normalize_seq(const Seq& c, F&& child) {
  Seq out;
  out.reserve(c.size());
  for (const auto& instr : c) {
    if (const auto* b = std::get_if<BlockT>(&instr.payload)) {
      Seq body = normalize_seq<Seq, BlockT>(b->body, child);
      if (body.empty()) continue;
      auto j = instr;
      j.payload = BlockT{std::move(body)};
      out.push_back(std::move(j));
    } else {
      out.push_back(child(instr));
    }
  }
  if (!out.empty() && std::holds_alternative<BlockT>(out.back().payload)) {
    Seq tail = std::move(std::get<BlockT>(out.back().payload).body);
    out.pop_back();
    std::move(tail.begin(), tail.end(), std::back_inserter(out));
  }
  return out;
}

ChorInstr normalize_chor_instr(const ChorInstr& instr) {
  if (const auto* p = std::get_if<chor::Cond>(&instr.payload))
    return ChorInstr(instr.line, instr.token,
                     chor::Cond{p->guard, p->proc, normalize(p->then_branch), normalize(p->else_branch)});
  if (const auto* p = std::get_if<chor::CallInProgress>(&instr.payload))
    return ChorInstr(instr.line, instr.token,
                     chor::CallInProgress{p->pending, p->procedure, p->roles, p->args, normalize(p->body)});
  return instr;
}

ProcInstr normalize_proc_instr(const ProcInstr& instr) {
  if (const auto* q = std::get_if<local::If>(&instr.payload))
    return local::If{q->guard, normalize(q->then_branch), normalize(q->else_branch)};
  if (const auto* q = std::get_if<local::Branch>(&instr.payload)) {
    local::Branch b;
    b.options.reserve(q->options.size());
    for (const auto& o : q->options) b.options.push_back({o.line, o.token, o.label, normalize(o.body)});
    return b;
  }
  return instr;
}

}  // namespace

Choreography normalize(const Choreography& c) {
  return normalize_seq<Choreography, chor::Block>(c, normalize_chor_instr);
}

ProcessBehavior normalize(const ProcessBehavior& p) {
  return normalize_seq<ProcessBehavior, local::Block>(p, normalize_proc_instr);
}

bool is_terminated(const Choreography& c) {
  return std::all_of(c.begin(), c.end(), [](const ChorInstr& i) {
    return i.is_block() && is_terminated(i.as<chor::Block>().body);
  });
}

bool is_terminated(const ProcessBehavior& p) {
  return std::all_of(p.begin(), p.end(), [](const ProcInstr& i) {
    return i.is<local::Block>() && is_terminated(i.as<local::Block>().body);
  });
}

}  // namespace o3
