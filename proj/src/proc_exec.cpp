#include "o3/proc_exec.hpp"

#include <algorithm>
#include <functional>

#include "o3/errors.hpp"
#include "o3/serialize.hpp"

namespace o3 {

NetConfiguration initial_net(const ProjectedProgram& projected, const StateMap& sigma) {
  NetConfiguration cfg;
  cfg.N = projected.network;
  cfg.sigma = sigma;
  for (const auto& [p, behavior] : cfg.N) cfg.sigma.try_emplace(p);
  for (const auto& [p, s] : cfg.sigma) cfg.K[p];
  return cfg;
}

bool is_terminated(const Network& n) {
  return std::all_of(n.begin(), n.end(), [](const auto& kv) { return is_terminated(kv.second); });
}

namespace {

IntegrityKey key_of(int line, const TokenExpr& t) { return {line, concrete(t)}; }

bool recv_matches(const Message& m, const local::Recv& r, KeyMode mode) {
  switch (mode) {
    case KeyMode::On: return m.key() == key_of(r.line, r.token);
    case KeyMode::NoTokens: return m.line == r.line && !m.payload.is_label();
    case KeyMode::Off: return m.sender == r.sender && !m.payload.is_label();
  }
  return false;
}

class Collector {
 public:
  Collector(const NetConfiguration& cfg, const std::string& q, const ProcDeclarations& decls, const NetOptions& opts,
            std::vector<TransitionCandidate>& out)
      : cfg_(cfg), q_(q), decls_(decls), opts_(opts), out_(out) {
    auto it = cfg.K.find(q);
    if (it != cfg.K.end()) bag_ = &it->second;
  }

  void walk(const ProcessBehavior& p) {
    bool delayed = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i == 1) {
        framing_.push_back("P-Delay");
        delayed = true;
      }
      path_.push_back(i);
      visit(p[i]);
      path_.pop_back();
      if (opts_.delay == DelayMode::InOrder) break;
      if (opts_.delay == DelayMode::Strict && p[i].is<local::Branch>()) break;
    }
    if (delayed) framing_.pop_back();
  }

 private:
  TransitionCandidate make(const std::string& rule, IntegrityKey key) const {
    TransitionCandidate t;
    t.rule = rule;
    t.actor = q_;
    t.key = std::move(key);
    t.path = path_;
    t.framing = framing_;
    return t;
  }

  // Indices of messages a receive may consume under the transport.
  std::vector<std::size_t> consumable() const {
    std::vector<std::size_t> out;
    if (!bag_ || bag_->empty()) return out;
    if (opts_.transport == Transport::Fifo) return {0};
    for (std::size_t j = 0; j < bag_->size(); ++j) out.push_back(j);
    return out;
  }

  void visit(const ProcInstr& instr) {
    const auto& p = instr.payload;
    if (const auto* x = std::get_if<local::Send>(&p)) {
      if (closed(x->expr)) out_.push_back(make("P-Send", key_of(x->line, x->token)));
    } else if (const auto* x = std::get_if<local::Recv>(&p)) {
      for (std::size_t j : consumable()) {
        const Message& m = (*bag_)[j];
        if (!recv_matches(m, *x, opts_.keys)) continue;
        auto t = make("P-Recv", key_of(x->line, x->token));
        t.message = j;
        t.payload = m.payload;
        out_.push_back(std::move(t));
      }
    } else if (const auto* x = std::get_if<local::Set>(&p)) {
      if (closed(x->expr)) out_.push_back(make("P-Compute", IntegrityKey{}));
    } else if (const auto* x = std::get_if<local::Choose>(&p)) {
      out_.push_back(make("P-Select", key_of(x->line, x->token)));
    } else if (const auto* x = std::get_if<local::Branch>(&p)) {
      for (std::size_t j : consumable()) {
        const Message& m = (*bag_)[j];
        if (!m.payload.is_label()) continue;
        for (std::size_t o = 0; o < x->options.size(); ++o) {
          const auto& opt = x->options[o];
          if (m.key() != key_of(opt.line, opt.token) || m.payload.label_name() != opt.label) continue;
          auto t = make("P-OnSelect", m.key());
          t.message = j;
          t.option = o;
          t.payload = m.payload;
          out_.push_back(std::move(t));
        }
      }
    } else if (const auto* x = std::get_if<local::If>(&p)) {
      if (closed(x->guard)) out_.push_back(make("P-If", IntegrityKey{}));
    } else if (const auto* x = std::get_if<local::Call>(&p)) {
      const bool ready = decls_.count(x->procedure) &&
                         std::all_of(x->args.begin(), x->args.end(), [](const Expr& a) { return closed(a); });
      if (ready) out_.push_back(make("P-Call", key_of(x->line, x->token)));
    } else if (const auto* x = std::get_if<local::Block>(&p)) {
      framing_.push_back("P-Block");
      walk(x->body);
      framing_.pop_back();
    }
  }

  const NetConfiguration& cfg_;
  const std::string& q_;
  const ProcDeclarations& decls_;
  const NetOptions& opts_;
  std::vector<TransitionCandidate>& out_;
  const MessageBag* bag_ = nullptr;
  std::vector<std::size_t> path_;
  std::vector<std::string> framing_;
};

using SeqRewrite = std::function<ProcessBehavior(const ProcessBehavior&, std::size_t)>;

ProcessBehavior rewrite(const ProcessBehavior& p, const std::vector<std::size_t>& path, std::size_t depth,
                        const SeqRewrite& f) {
  const std::size_t i = path[depth];
  if (i >= p.size()) throw IllegalTransition("path does not address an instruction");
  if (depth + 1 == path.size()) return f(p, i);
  const auto* b = std::get_if<local::Block>(&p[i].payload);
  if (!b) throw IllegalTransition("path steps into an instruction that is not a block");
  ProcessBehavior out(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(i));
  ProcessBehavior rest = concat_block(rewrite(b->body, path, depth + 1, f),
                                      ProcessBehavior(p.begin() + static_cast<std::ptrdiff_t>(i) + 1, p.end()));
  std::move(rest.begin(), rest.end(), std::back_inserter(out));
  return out;
}

ProcessBehavior head(const ProcessBehavior& p, std::size_t i) {
  return ProcessBehavior(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(i));
}

ProcessBehavior tail(const ProcessBehavior& p, std::size_t i) {
  return ProcessBehavior(p.begin() + static_cast<std::ptrdiff_t>(i), p.end());
}

ProcessBehavior splice(ProcessBehavior a, ProcessBehavior b) {
  std::move(b.begin(), b.end(), std::back_inserter(a));
  return a;
}

}  // namespace

std::vector<TransitionCandidate> enabled_at(const NetConfiguration& cfg, const std::string& q,
                                            const ProcDeclarations& decls, const NetOptions& opts) {
  std::vector<TransitionCandidate> out;
  auto it = cfg.N.find(q);
  if (it == cfg.N.end()) return out;
  Collector(cfg, q, decls, opts, out).walk(it->second);
  return out;
}

std::vector<TransitionCandidate> enabled_net(const NetConfiguration& cfg, const ProcDeclarations& decls,
                                             const NetOptions& opts) {
  std::vector<TransitionCandidate> out;
  for (const auto& [q, behavior] : cfg.N) Collector(cfg, q, decls, opts, out).walk(behavior);
  return out;
}

NetStep step_net(const NetConfiguration& cfg, const TransitionCandidate& cand, const ProcDeclarations& decls,
                 const NetOptions& opts, const BuiltinRegistry& builtins) {
  const auto en = enabled_at(cfg, cand.actor, decls, opts);
  if (std::find(en.begin(), en.end(), cand) == en.end())
    throw IllegalTransition(cand.rule + " by " + cand.actor + " at " + cand.key.to_string() + " is not enabled");

  NetStep result;
  result.cfg.sigma = cfg.sigma;
  result.cfg.K = cfg.K;
  auto& sigma = result.cfg.sigma;
  auto& K = result.cfg.K;
  const std::string& q = cand.actor;

  const SeqRewrite f = [&](const ProcessBehavior& seq, std::size_t i) -> ProcessBehavior {
    const auto& p = seq[i].payload;
    if (const auto* x = std::get_if<local::Send>(&p)) {
      auto [v, s] = eval(sigma[q], x->expr, builtins);
      sigma[q] = std::move(s);
      K[x->to].push_back({x->line, concrete(x->token), v, q});
      result.message = v;
      return splice(head(seq, i), tail(seq, i + 1));
    }
    if (const auto* x = std::get_if<local::Recv>(&p)) {
      auto& bag = K[q];
      const Value v = bag[*cand.message].payload;
      bag.erase(bag.begin() + static_cast<std::ptrdiff_t>(*cand.message));
      result.message = v;
      return splice(head(seq, i), substitute_proc(tail(seq, i + 1), x->var, v));
    }
    if (const auto* x = std::get_if<local::Set>(&p)) {
      auto [v, s] = eval(sigma[q], x->expr, builtins);
      sigma[q] = std::move(s);
      return splice(head(seq, i), substitute_proc(tail(seq, i + 1), x->var, v));
    }
    if (const auto* x = std::get_if<local::Choose>(&p)) {
      K[x->to].push_back({x->line, concrete(x->token), Value::label(x->label), q});
      result.message = Value::label(x->label);
      return splice(head(seq, i), tail(seq, i + 1));
    }
    if (const auto* x = std::get_if<local::Branch>(&p)) {
      auto& bag = K[q];
      result.message = bag[*cand.message].payload;
      bag.erase(bag.begin() + static_cast<std::ptrdiff_t>(*cand.message));
      return splice(head(seq, i), concat_block(x->options[*cand.option].body, tail(seq, i + 1)));
    }
    if (const auto* x = std::get_if<local::If>(&p)) {
      auto [b, s] = eval_guard(sigma[q], x->guard, builtins);
      sigma[q] = std::move(s);
      return splice(head(seq, i), concat_block(b ? x->then_branch : x->else_branch, tail(seq, i + 1)));
    }
    if (const auto* x = std::get_if<local::Call>(&p)) {
      const auto& decl = decls.at(x->procedure);
      const Token tok = concrete(x->token);
      ProcessBehavior body = instantiate_procedure(decl, x->procs, x->args, next_token(x->line, tok));
      return splice(head(seq, i), concat_block(std::move(body), tail(seq, i + 1)));
    }
    throw IllegalTransition("no rule applies to a block");
  };

  result.cfg.N = cfg.N;
  result.cfg.N[q] = rewrite(cfg.N.at(q), cand.path, 0, f);
  return result;
}

NetConfiguration apply_net(const NetConfiguration& cfg, const TransitionCandidate& cand, const ProcDeclarations& decls,
                           const NetOptions& opts, const BuiltinRegistry& builtins) {
  return step_net(cfg, cand, decls, opts, builtins).cfg;
}

Trace run_net(const NetConfiguration& cfg, const ProcDeclarations& decls, const Scheduler& scheduler, std::size_t bound,
              const NetOptions& opts, NetConfiguration* final_cfg, const BuiltinRegistry& builtins) {
  Trace trace;
  NetConfiguration cur = cfg;
  Picker picker(scheduler);
  while (trace.steps.size() < bound) {
    const auto cands = enabled_net(cur, decls, opts);
    const auto choice = picker.pick(cands.size());
    if (!choice) break;
    const auto& cand = cands[*choice];
    NetStep next = step_net(cur, cand, decls, opts, builtins);
    cur = std::move(next.cfg);
    trace.steps.push_back({cand.rule, cand.actor, cand.key, std::move(next.message), state_hash(cur)});
  }
  trace.terminated = is_terminated(cur.N);
  trace.stuck = !trace.terminated && enabled_net(cur, decls, opts).empty();
  if (final_cfg) *final_cfg = std::move(cur);
  return trace;
}

std::string canonical(const NetConfiguration& cfg) {
  std::string out;
  out.reserve(256);
  out += '(';
  for (const auto& [p, b] : cfg.N) {
    out += std::to_string(p.size()) + ":" + p;
    encode_normal(out, b);
  }
  out += ')';
  encode(out, cfg.sigma);
  encode(out, cfg.K);
  return out;
}

std::uint64_t state_hash(const NetConfiguration& cfg) { return fnv1a64(canonical(cfg)); }

}  // namespace o3
