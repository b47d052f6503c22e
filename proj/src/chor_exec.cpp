#include "o3/chor_exec.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "o3/errors.hpp"
#include "o3/serialize.hpp"

namespace o3 {

ChorConfiguration initial_configuration(const Program& prog, const StateMap& sigma) {
  ChorConfiguration cfg;
  cfg.C = prog.main;
  cfg.sigma = sigma;
  for (const auto& p : pn(prog.main)) cfg.sigma.try_emplace(p);
  for (const auto& [p, s] : cfg.sigma) cfg.K[p];
  return cfg;
}

namespace {

std::size_t count_key(const MessageMap& K, const std::string& q, const IntegrityKey& k) {
  auto it = K.find(q);
  if (it == K.end()) return 0;
  return static_cast<std::size_t>(
      std::count_if(it->second.begin(), it->second.end(), [&](const Message& m) { return m.key() == k; }));
}

bool args_closed(const std::vector<Expr>& args) {
  return std::all_of(args.begin(), args.end(), [](const Expr& a) { return closed(a); });
}

class Collector {
 public:
  Collector(const ChorConfiguration& cfg, const Program& prog, std::vector<TransitionCandidate>& out)
      : cfg_(cfg), prog_(prog), out_(out) {}

  void walk(const Choreography& c, const std::set<std::string>& outer) {
    std::set<std::string> extra;
    const std::set<std::string>* blocked = &outer;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const ChorInstr& instr = c[i];
      path_.push_back(i);
      if (i == 1) framing_.push_back("C-Delay");
      visit(instr, *blocked);
      path_.pop_back();
      const std::string* to = nullptr;
      if (const auto* s = std::get_if<chor::Select>(&instr.payload)) to = &s->to;
      if (const auto* s = std::get_if<chor::SelectInProgress>(&instr.payload)) to = &s->to;
      if (to && !blocked->count(*to)) {
        if (blocked == &outer) extra = outer;
        extra.insert(*to);
        blocked = &extra;
      }
    }
    if (c.size() > 1) framing_.pop_back();
  }

 private:
  void emit(const std::string& rule, const std::string& actor, const ChorInstr& instr,
            const std::set<std::string>& blocked) {
    if (blocked.count(actor)) return;
    TransitionCandidate t;
    t.rule = rule;
    t.actor = actor;
    t.key = instr.key();
    t.path = path_;
    t.framing = framing_;
    out_.push_back(std::move(t));
  }

  void visit(const ChorInstr& instr, const std::set<std::string>& blocked) {
    const auto& p = instr.payload;
    if (const auto* x = std::get_if<chor::Comm>(&p)) {
      if (closed(x->expr)) emit("C-Send", x->from, instr, blocked);
    } else if (const auto* x = std::get_if<chor::CommInProgress>(&p)) {
      if (count_key(cfg_.K, x->to, instr.key()) > 0) emit("C-Recv", x->to, instr, blocked);
    } else if (const auto* x = std::get_if<chor::Select>(&p)) {
      emit("C-Select", x->from, instr, blocked);
    } else if (const auto* x = std::get_if<chor::SelectInProgress>(&p)) {
      auto it = cfg_.K.find(x->to);
      if (it != cfg_.K.end()) {
        const Message want{instr.line, instr.key().token, Value::label(x->label), {}};
        const bool present = std::any_of(it->second.begin(), it->second.end(), [&](const Message& m) {
          return m.key() == want.key() && m.payload == want.payload;
        });
        if (present) emit("C-OnSelect", x->to, instr, blocked);
      }
    } else if (const auto* x = std::get_if<chor::Compute>(&p)) {
      if (closed(x->expr)) emit("C-Compute", x->proc, instr, blocked);
    } else if (const auto* x = std::get_if<chor::Cond>(&p)) {
      if (closed(x->guard)) emit("C-If", x->proc, instr, blocked);
    } else if (const auto* x = std::get_if<chor::Call>(&p)) {
      if (!prog_.find(x->procedure) || !args_closed(x->args)) return;
      std::set<std::string> seen;
      for (const auto& r : x->roles)
        if (seen.insert(r).second) emit("C-First", r, instr, blocked);
    } else if (const auto* x = std::get_if<chor::CallInProgress>(&p)) {
      if (x->pending.size() == 1) {
        emit("C-Last", x->pending.front(), instr, blocked);
      } else {
        for (const auto& r : x->pending) emit("C-Enter", r, instr, blocked);
      }
      std::set<std::string> inner = blocked;
      inner.insert(x->pending.begin(), x->pending.end());
      framing_.push_back("C-Delay-Proc");
      walk(x->body, inner);
      framing_.pop_back();
    } else if (const auto* x = std::get_if<chor::Block>(&p)) {
      framing_.push_back("C-Block");
      walk(x->body, blocked);
      framing_.pop_back();
    }
  }

  const ChorConfiguration& cfg_;
  const Program& prog_;
  std::vector<TransitionCandidate>& out_;
  std::vector<std::size_t> path_;
  std::vector<std::string> framing_;
};

using SeqRewrite = std::function<Choreography(const Choreography&, std::size_t)>;

// Rebuilds `c` along `path`, applying `f` to the innermost sequence. Leaving a
// block re-applies ⨟ (C-Block); call bodies are replaced in place (C-Delay-Proc).
Choreography rewrite(const Choreography& c, const std::vector<std::size_t>& path, std::size_t depth,
                     const SeqRewrite& f) {
  const std::size_t i = path[depth];
  if (i >= c.size()) throw IllegalTransition("path does not address an instruction");
  if (depth + 1 == path.size()) return f(c, i);
  const ChorInstr& instr = c[i];
  if (const auto* b = std::get_if<chor::Block>(&instr.payload)) {
    Choreography body = rewrite(b->body, path, depth + 1, f);
    Choreography out(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(i));
    Choreography rest = concat_block(std::move(body), Choreography(c.begin() + static_cast<std::ptrdiff_t>(i) + 1, c.end()));
    std::move(rest.begin(), rest.end(), std::back_inserter(out));
    return out;
  }
  if (const auto* k = std::get_if<chor::CallInProgress>(&instr.payload)) {
    Choreography out = c;
    out[i].as<chor::CallInProgress>().body = rewrite(k->body, path, depth + 1, f);
    return out;
  }
  throw IllegalTransition("path steps into an instruction without a body");
}

Choreography prefix(const Choreography& c, std::size_t i) {
  return Choreography(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(i));
}

Choreography suffix(const Choreography& c, std::size_t i) {
  return Choreography(c.begin() + static_cast<std::ptrdiff_t>(i), c.end());
}

Choreography splice(Choreography head, Choreography tail) {
  std::move(tail.begin(), tail.end(), std::back_inserter(head));
  return head;
}

}  // namespace

std::vector<TransitionCandidate> enabled(const ChorConfiguration& cfg, const Program& prog) {
  std::vector<TransitionCandidate> out;
  Collector(cfg, prog, out).walk(cfg.C, {});
  return out;
}

ChorStep step(const ChorConfiguration& cfg, const TransitionCandidate& cand, const Program& prog,
              const BuiltinRegistry& builtins) {
  const auto en = enabled(cfg, prog);
  const bool ok = std::any_of(en.begin(), en.end(), [&](const TransitionCandidate& t) {
    return t.rule == cand.rule && t.actor == cand.actor && t.key == cand.key && t.path == cand.path;
  });
  if (!ok) throw IllegalTransition(cand.rule + " by " + cand.actor + " at " + cand.key.to_string() + " is not enabled");

  ChorStep result;
  result.cfg.sigma = cfg.sigma;
  result.cfg.K = cfg.K;
  auto& sigma = result.cfg.sigma;
  auto& K = result.cfg.K;
  std::optional<Value>& moved = result.message;

  const SeqRewrite f = [&](const Choreography& seq, std::size_t i) -> Choreography {
    const ChorInstr& instr = seq[i];
    const IntegrityKey key = instr.key();
    const auto& p = instr.payload;
    if (const auto* x = std::get_if<chor::Comm>(&p)) {
      auto [v, s] = eval(sigma[x->from], x->expr, builtins);
      sigma[x->from] = std::move(s);
      K[x->to].push_back({key.line, key.token, v, x->from});
      moved = v;
      Choreography out = seq;
      out[i] = ChorInstr(instr.line, instr.token, chor::CommInProgress{x->from, x->to, x->var});
      return out;
    }
    if (const auto* x = std::get_if<chor::CommInProgress>(&p)) {
      auto& bag = K[x->to];
      std::vector<std::size_t> hits;
      for (std::size_t j = 0; j < bag.size(); ++j)
        if (bag[j].key() == key) hits.push_back(j);
      if (hits.size() > 1) throw AmbiguousMessage(std::to_string(hits.size()) + " messages carry key " + key.to_string());
      const Value v = bag[hits.front()].payload;
      bag.erase(bag.begin() + static_cast<std::ptrdiff_t>(hits.front()));
      moved = v;
      return splice(prefix(seq, i), substitute(suffix(seq, i + 1), {x->to, x->var}, v));
    }
    if (const auto* x = std::get_if<chor::Select>(&p)) {
      K[x->to].push_back({key.line, key.token, Value::label(x->label), x->from});
      moved = Value::label(x->label);
      Choreography out = seq;
      out[i] = ChorInstr(instr.line, instr.token, chor::SelectInProgress{x->from, x->to, x->label});
      return out;
    }
    if (const auto* x = std::get_if<chor::SelectInProgress>(&p)) {
      auto& bag = K[x->to];
      const Value label = Value::label(x->label);
      auto it = std::find_if(bag.begin(), bag.end(), [&](const Message& m) { return m.key() == key && m.payload == label; });
      bag.erase(it);
      moved = label;
      return splice(prefix(seq, i), suffix(seq, i + 1));
    }
    if (const auto* x = std::get_if<chor::Compute>(&p)) {
      auto [v, s] = eval(sigma[x->proc], x->expr, builtins);
      sigma[x->proc] = std::move(s);
      return splice(prefix(seq, i), substitute(suffix(seq, i + 1), {x->proc, x->var}, v));
    }
    if (const auto* x = std::get_if<chor::Cond>(&p)) {
      auto [b, s] = eval_guard(sigma[x->proc], x->guard, builtins);
      sigma[x->proc] = std::move(s);
      return splice(prefix(seq, i), concat_block(b ? x->then_branch : x->else_branch, suffix(seq, i + 1)));
    }
    if (const auto* x = std::get_if<chor::Call>(&p)) {
      const ProcedureDecl* decl = prog.find(x->procedure);
      Choreography body = instantiate_procedure(*decl, x->roles, x->args, next_token(key.line, key.token));
      std::vector<std::string> pending;
      for (const auto& r : x->roles)
        if (r != cand.actor) pending.push_back(r);
      if (pending.empty()) return splice(prefix(seq, i), concat_block(std::move(body), suffix(seq, i + 1)));
      Choreography out = seq;
      out[i] = ChorInstr(instr.line, instr.token,
                         chor::CallInProgress{std::move(pending), x->procedure, x->roles, x->args, std::move(body)});
      return out;
    }
    if (const auto* x = std::get_if<chor::CallInProgress>(&p)) {
      if (cand.rule == "C-Last") return splice(prefix(seq, i), concat_block(x->body, suffix(seq, i + 1)));
      Choreography out = seq;
      auto& pending = out[i].as<chor::CallInProgress>().pending;
      pending.erase(std::remove(pending.begin(), pending.end(), cand.actor), pending.end());
      return out;
    }
    throw IllegalTransition("no rule applies to a block");
  };

  result.cfg.C = rewrite(cfg.C, cand.path, 0, f);
  return result;
}

ChorConfiguration apply(const ChorConfiguration& cfg, const TransitionCandidate& cand, const Program& prog,
                        const BuiltinRegistry& builtins) {
  return step(cfg, cand, prog, builtins).cfg;
}

Picker::Picker(const Scheduler& s) : scheduler_(s), state_(s.seed) {}

std::optional<std::size_t> Picker::pick(std::size_t n) {
  if (n == 0) return std::nullopt;
  switch (scheduler_.policy) {
    case SchedulePolicy::InOrder:
      return 0;
    case SchedulePolicy::Random: {
      std::mt19937_64 rng(state_);
      state_ = rng();
      return static_cast<std::size_t>(state_ % n);
    }
    case SchedulePolicy::List:
      if (cursor_ >= scheduler_.choices.size()) return std::nullopt;
      if (scheduler_.choices[cursor_] >= n) return std::nullopt;
      return scheduler_.choices[cursor_++];
  }
  return std::nullopt;
}

Trace run(const ChorConfiguration& cfg, const Program& prog, const Scheduler& scheduler, std::size_t bound,
          ChorConfiguration* final_cfg, const BuiltinRegistry& builtins) {
  Trace trace;
  ChorConfiguration cur = cfg;
  Picker picker(scheduler);
  while (trace.steps.size() < bound) {
    const auto cands = enabled(cur, prog);
    const auto choice = picker.pick(cands.size());
    if (!choice) break;
    const auto& cand = cands[*choice];
    ChorStep next = step(cur, cand, prog, builtins);
    cur = std::move(next.cfg);
    trace.steps.push_back({cand.rule, cand.actor, cand.key, std::move(next.message), state_hash(cur)});
  }
  trace.terminated = is_terminated(cur.C);
  trace.stuck = !trace.terminated && enabled(cur, prog).empty();
  if (final_cfg) *final_cfg = std::move(cur);
  return trace;
}

}  // namespace o3
