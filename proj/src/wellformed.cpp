#include "o3/wellformed.hpp"

#include <algorithm>
#include <set>

#include "o3/epp.hpp"

namespace o3 {

void WfReport::add(std::string rule, std::string where, std::string message) {
  violations.push_back({std::move(rule), std::move(where), std::move(message)});
}

void WfReport::append(const WfReport& other) {
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

bool WfReport::cites(const std::string& rule) const {
  return std::any_of(violations.begin(), violations.end(), [&](const WfViolation& v) { return v.rule == rule; });
}

namespace {

std::string where_of(const ChorInstr& i) {
  if (i.is_block()) return "block";
  return "(" + std::to_string(i.line) + "," + to_string(i.token) + ")";
}

std::string join(const std::set<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

std::size_t count_key(const MessageMap& K, const std::string& q, const IntegrityKey& k) {
  auto it = K.find(q);
  if (it == K.end()) return 0;
  return static_cast<std::size_t>(
      std::count_if(it->second.begin(), it->second.end(), [&](const Message& m) { return m.key() == k; }));
}

bool has_message(const MessageMap& K, const std::string& q, const IntegrityKey& k, const Value& v) {
  auto it = K.find(q);
  if (it == K.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](const Message& m) { return m.key() == k && m.payload == v; });
}

// Atoms of an expression must live at `p`.
void check_located(const Expr& e, const std::string& p, const std::string& where, WfReport& r) {
  const auto procs = pn(e);
  for (const auto& q : procs)
    if (q != p) r.add("C-WF-Located", where, "expression evaluated at '" + p + "' mentions process '" + q + "'");
}

void check_call_shape(const std::string& procedure, const std::vector<std::string>& roles,
                      const std::vector<Expr>& args, const Program& prog, const std::string& where,
                      const std::string& rule, WfReport& r) {
  const ProcedureDecl* decl = prog.find(procedure);
  if (!decl) {
    r.add(rule, where, "unknown procedure '" + procedure + "'");
    return;
  }
  if (std::set<std::string>(roles.begin(), roles.end()).size() != roles.size())
    r.add(rule, where, "roles of call to " + procedure + " are not distinct");
  if (roles.size() != decl->roles.size() || args.size() != decl->params.size()) {
    r.add(rule, where, "arity mismatch in call to " + procedure);
    return;
  }
  for (std::size_t j = 0; j < args.size(); ++j) {
    const auto& a = args[j];
    if (a.is_app()) {
      r.add(rule, where, "argument " + std::to_string(j + 1) + " is not an atom");
      continue;
    }
    for (std::size_t i = 0; i < roles.size(); ++i)
      if (a.proc == roles[i] && decl->params[j].proc != decl->roles[i])
        r.add(rule, where,
              "argument " + std::to_string(j + 1) + " located at '" + a.proc + "' does not match parameter " +
                  decl->params[j].to_string());
    if (std::find(roles.begin(), roles.end(), a.proc) == roles.end())
      r.add(rule, where, "argument " + std::to_string(j + 1) + " located at non-participant '" + a.proc + "'");
  }
}

void check_calling(const chor::CallInProgress& c, const ChorInstr& instr, const Program& prog, WfReport& r) {
  const std::string where = where_of(instr);
  check_call_shape(c.procedure, c.roles, c.args, prog, where, "C-WF-Calling", r);
  if (!r.ok()) return;
  for (const auto& q : c.pending)
    if (std::find(c.roles.begin(), c.roles.end(), q) == c.roles.end())
      r.add("C-WF-Calling", where, "pending role '" + q + "' is not a participant");
  if (is_placeholder(instr.token)) return;
  const IntegrityKey key = instr.key();
  for (const ChorInstr* i : stats(c.body)) {
    if (is_placeholder(i->token)) continue;
    if (!strict_prefix(key, i->key()))
      r.add("C-WF-Calling", where, "body instruction " + where_of(*i) + " does not extend the call key");
  }
  const ProcedureDecl* decl = prog.find(c.procedure);
  Choreography fresh;
  try {
    fresh = instantiate_procedure(*decl, c.roles, c.args, next_token(key.line, key.token));
  } catch (const Error& e) {
    r.add("C-WF-Calling", where, e.what());
    return;
  }
  for (const auto& q : c.pending) {
    try {
      const auto expected = project_role(fresh, q, prog.decls);
      const auto actual = project_role(c.body, q, prog.decls);
      if (!branch_geq(expected, actual))
        r.add("C-WF-Calling", where, "pending role '" + q + "' no longer behaves as the declared body");
    } catch (const ProjectionError& e) {
      r.add("C-WF-Calling", where, e.what());
    }
  }
}

}  // namespace

WfReport check_instr(const ChorInstr& instr, const MessageMap& K, const Program& prog) {
  WfReport r;
  const std::string where = where_of(instr);
  const bool keyed = instr.has_key() && !is_placeholder(instr.token);
  const auto& payload = instr.payload;
  if (const auto* c = std::get_if<chor::Comm>(&payload)) {
    check_located(c->expr, c->from, where, r);
    if (c->from == c->to) r.add("C-WF-Located", where, "process '" + c->from + "' communicates with itself");
    if (keyed && count_key(K, c->to, instr.key()) != 0)
      r.add("C-WF-Send", where, "message " + instr.key().to_string() + " already in K(" + c->to + ")");
  } else if (const auto* c = std::get_if<chor::CommInProgress>(&payload)) {
    if (keyed && count_key(K, c->to, instr.key()) != 1)
      r.add("C-WF-Recv", where,
            "expected exactly one message " + instr.key().to_string() + " in K(" + c->to + "), found " +
                std::to_string(count_key(K, c->to, instr.key())));
  } else if (const auto* c = std::get_if<chor::Select>(&payload)) {
    if (c->from == c->to) r.add("C-WF-Located", where, "process '" + c->from + "' selects at itself");
    if (keyed && has_message(K, c->to, instr.key(), Value::label(c->label)))
      r.add("C-WF-Select", where, "selection " + instr.key().to_string() + " already in K(" + c->to + ")");
  } else if (const auto* c = std::get_if<chor::SelectInProgress>(&payload)) {
    if (keyed && !has_message(K, c->to, instr.key(), Value::label(c->label)))
      r.add("C-WF-OnSelect", where, "label " + c->label + " missing from K(" + c->to + ")");
  } else if (const auto* c = std::get_if<chor::Compute>(&payload)) {
    check_located(c->expr, c->proc, where, r);
  } else if (const auto* c = std::get_if<chor::Cond>(&payload)) {
    check_located(c->guard, c->proc, where, r);
    if (contains_runtime_terms(c->then_branch) || contains_runtime_terms(c->else_branch))
      r.add("C-WF-If", where, "conditional branches contain runtime terms");
  } else if (const auto* c = std::get_if<chor::Call>(&payload)) {
    check_call_shape(c->procedure, c->roles, c->args, prog, where, "C-WF-Call", r);
  } else if (const auto* c = std::get_if<chor::CallInProgress>(&payload)) {
    check_calling(*c, instr, prog, r);
  }
  return r;
}

WfReport check_decl(const ProcedureDecl& decl, const Program& prog) {
  WfReport r;
  const std::string where = "procedure " + decl.name;
  const std::set<std::string> roles(decl.roles.begin(), decl.roles.end());
  if (roles.size() != decl.roles.size()) r.add("C-WF-Def", where, "roles are not distinct");
  const std::set<LocatedVar> params(decl.params.begin(), decl.params.end());
  if (params.size() != decl.params.size()) r.add("C-WF-Def", where, "parameters are not distinct");
  for (const auto& p : decl.params)
    if (!roles.count(p.proc)) r.add("C-WF-Def", where, "parameter " + p.to_string() + " is not located at a role");
  std::set<std::string> extra;
  for (const auto& p : pn(decl.body))
    if (!roles.count(p)) extra.insert(p);
  if (!extra.empty()) r.add("C-WF-Def", where, "body mentions non-role processes: " + join(extra));
  if (contains_runtime_terms(decl.body)) r.add("C-WF-Def", where, "body contains runtime terms");
  std::set<std::string> free;
  for (const auto& v : fv(decl.body))
    if (!params.count(v)) free.insert(v.to_string());
  if (!free.empty()) r.add("C-WF-Def", where, "free variables outside the parameters: " + join(free));
  const auto keys = keys_chor(decl.body);
  std::set<int> lines;
  for (const auto& k : keys) {
    if (!lines.insert(k.line).second)
      r.add("C-WF-Def", where, "line " + std::to_string(k.line) + " keys two instructions");
    if (!is_placeholder(k.token)) r.add("C-WF-Def", where, "line " + std::to_string(k.line) + " has a concrete token");
  }
  for (const ChorInstr* i : stats(decl.body)) r.append(check_instr(*i, {}, prog));
  return r;
}

WfReport check_config(const ChorConfiguration& cfg, const Program& prog, bool include_decls) {
  WfReport r;
  for (const auto& p : pn(cfg.C)) {
    if (!cfg.sigma.count(p)) r.add("C-WF", p, "process '" + p + "' has no state in Σ");
    if (!cfg.K.count(p)) r.add("C-WF", p, "process '" + p + "' has no message bag in K");
  }
  std::set<std::string> free;
  for (const auto& v : fv(cfg.C)) free.insert(v.to_string());
  if (!free.empty()) r.add("C-WF", "main", "free variables: " + join(free));

  const auto st = stats(cfg.C);
  std::vector<IntegrityKey> keys;
  keys.reserve(st.size());
  bool concrete_keys = true;
  for (const ChorInstr* i : st) {
    if (is_placeholder(i->token)) {
      r.add("C-WF", where_of(*i), "PlaceholderToken: runtime instruction carries the token placeholder");
      concrete_keys = false;
      continue;
    }
    keys.push_back(i->key());
  }
  std::set<IntegrityKey> seen;
  for (const auto& k : keys)
    if (!seen.insert(k).second) r.add("C-WF", k.to_string(), "integrity key " + k.to_string() + " is not distinct");

  if (concrete_keys) {
    for (std::size_t x = 0; x < st.size(); ++x) {
      const ChorInstr* a = st[x];
      const IntegrityKey& ka = keys[x];
      std::vector<const ChorInstr*> inner;
      if (const auto* c = std::get_if<chor::CallInProgress>(&a->payload)) {
        inner = stats(c->body);
        std::sort(inner.begin(), inner.end());
      }
      for (std::size_t y = 0; y < st.size(); ++y) {
        const ChorInstr* b = st[y];
        const IntegrityKey& kb = keys[y];
        if (a == b || ka == kb || !is_prefix(ka, kb)) continue;
        const bool nested = std::binary_search(inner.begin(), inner.end(), b);
        if (!nested)
          r.add("C-WF-Calling", kb.to_string(),
                "key " + ka.to_string() + " is a prefix of " + kb.to_string() + " outside a call in progress");
      }
    }
  }

  // Message → term direction: every undelivered message is awaited.
  for (const auto& [q, bag] : cfg.K) {
    for (const auto& m : bag) {
      std::size_t matches = 0;
      for (const ChorInstr* i : st) {
        if (is_placeholder(i->token) || i->key() != m.key()) continue;
        if (const auto* c = std::get_if<chor::CommInProgress>(&i->payload); c && c->to == q && !m.payload.is_label())
          ++matches;
        if (const auto* c = std::get_if<chor::SelectInProgress>(&i->payload);
            c && c->to == q && m.payload == Value::label(c->label))
          ++matches;
      }
      if (matches != 1)
        r.add("C-WF-Msg", m.key().to_string(),
              "message " + m.key().to_string() + " in K(" + q + ") is awaited by " + std::to_string(matches) +
                  " in-progress terms");
    }
  }

  if (include_decls)
    for (const auto& d : prog.decls) r.append(check_decl(d, prog));
  for (const ChorInstr* i : st) r.append(check_instr(*i, cfg.K, prog));
  return r;
}

WfReport check_program(const Program& prog) {
  return check_config(initial_configuration(prog), prog, true);
}

WfReport check_network(const Network& n) {
  WfReport r;
  for (const auto& [p, behavior] : n) {
    std::set<KeyAnnot> seen;
    for (const auto& k : keys_proc(behavior))
      if (!seen.insert(k).second)
        r.add("N-WF", p, "key (" + std::to_string(k.line) + "," + to_string(k.token) + ") occurs twice");
  }
  return r;
}

}  // namespace o3
