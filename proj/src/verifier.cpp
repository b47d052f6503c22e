#include "o3/verifier.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "o3/errors.hpp"
#include "o3/serialize.hpp"
#include "o3/wellformed.hpp"

namespace o3 {

namespace {

const ChorInstr& chor_at(const Choreography& c, const std::vector<std::size_t>& path) {
  const Choreography* seq = &c;
  for (std::size_t d = 0;; ++d) {
    const ChorInstr& i = seq->at(path[d]);
    if (d + 1 == path.size()) return i;
    if (const auto* b = std::get_if<chor::Block>(&i.payload))
      seq = &b->body;
    else
      seq = &i.as<chor::CallInProgress>().body;
  }
}

const ProcInstr& proc_at(const ProcessBehavior& p, const std::vector<std::size_t>& path) {
  const ProcessBehavior* seq = &p;
  for (std::size_t d = 0;; ++d) {
    const ProcInstr& i = seq->at(path[d]);
    if (d + 1 == path.size()) return i;
    seq = &i.as<local::Block>().body;
  }
}

// Parent-pointer tree of explored states, for witness reconstruction.
class StateTree {
 public:
  std::size_t root() {
    nodes_.push_back({npos, {}, 0});
    return 0;
  }
  std::size_t add(std::size_t parent, StepRecord step) {
    nodes_.push_back({parent, std::move(step), nodes_[parent].depth + 1});
    return nodes_.size() - 1;
  }
  std::size_t depth(std::size_t n) const { return nodes_[n].depth; }
  std::vector<StepRecord> path(std::size_t n, std::optional<StepRecord> last = std::nullopt) const {
    std::vector<StepRecord> out;
    if (last) out.push_back(std::move(*last));
    for (; n != npos && nodes_[n].parent != npos; n = nodes_[n].parent) out.push_back(nodes_[n].step);
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  struct Node {
    std::size_t parent;
    StepRecord step;
    std::size_t depth;
  };
  std::vector<Node> nodes_;
};

// Visited sets keep a 128-bit digest from two unrelated hash functions
// instead of the full canonical text.
struct Digest {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  bool operator==(const Digest&) const = default;
};

struct DigestHash {
  std::size_t operator()(const Digest& d) const { return d.a ^ (d.b * 0x9e3779b97f4a7c15ULL); }
};

Digest digest(const std::string& s) { return {fnv1a64(s), std::hash<std::string>{}(s)}; }

using VisitedSet = std::unordered_set<Digest, DigestHash>;

void encode_ledger(std::string& out, const SendLedger& ledger) {
  out += "#L";
  for (const auto& [k, e] : ledger) {
    out += k.to_string();
    out += e.sender + "/" + e.receiver + "/" + e.variable + "/";
    encode(out, e.payload);
    out += ';';
  }
}

MessageMap sorted_bags(const MessageMap& K) {
  MessageMap out = K;
  for (auto& [q, bag] : out) std::sort(bag.begin(), bag.end());
  return out;
}

std::vector<std::string> process_names(const StateMap& sigma) {
  std::vector<std::string> out;
  for (const auto& [p, s] : sigma) out.push_back(p);
  return out;
}

}  // namespace

std::optional<std::size_t> commuting_transition(const ChorConfiguration& cfg,
                                                const std::vector<TransitionCandidate>& cands) {
  for (std::size_t k = 0; k < cands.size(); ++k) {
    const auto& t = cands[k];
    if (t.rule == "C-Recv" || t.rule == "C-OnSelect" || t.rule == "C-Select" || t.rule == "C-First" ||
        t.rule == "C-Enter" || t.rule == "C-Last")
      return k;
    const auto& p = chor_at(cfg.C, t.path).payload;
    if (const auto* x = std::get_if<chor::Comm>(&p); x && x->expr.is_val()) return k;
    if (const auto* x = std::get_if<chor::Compute>(&p); x && x->expr.is_val()) return k;
    if (const auto* x = std::get_if<chor::Cond>(&p); x && x->guard.is_val()) return k;
  }
  return std::nullopt;
}

ExplorationResult explore_chor(const Program& prog, const StateMap& sigma, const ExploreOptions& opts) {
  ExplorationResult res;
  res.reduced = opts.reduce;
  StateTree tree;
  auto full = [&] { return res.violations.size() >= opts.max_violations; };

  struct Item {
    std::size_t node;
    ChorConfiguration cfg;
    SendLedger ledger;
  };
  std::deque<Item> queue;
  VisitedSet visited;

  ChorConfiguration init = initial_configuration(prog, sigma);
  const std::size_t root = tree.root();
  if (opts.preservation) {
    WfReport wf = check_program(prog);
    if (!wf.ok()) {
      const auto& v = wf.violations.front();
      res.violations.push_back({"preservation", v.rule + " at " + v.where + ": " + v.message, {}});
      res.states = 1;
      return res;
    }
  }
  visited.insert(digest(canonical(init) + "#L"));
  queue.push_back({root, std::move(init), {}});
  res.states = 1;

  while (!queue.empty() && !full()) {
    Item item = std::move(queue.front());
    queue.pop_front();
    const std::size_t d = tree.depth(item.node);
    res.depth = std::max(res.depth, d);
    const auto& cfg = item.cfg;

    if (opts.preservation && d > 0) {
      WfReport wf = check_config(cfg, prog, false);
      if (!wf.ok()) {
        const auto& v = wf.violations.front();
        res.violations.push_back({"preservation", v.rule + " at " + v.where + ": " + v.message, tree.path(item.node)});
        continue;
      }
    }
    const auto cands = enabled(cfg, prog);
    if (opts.progress && cands.empty() && !is_terminated(cfg.C)) {
      res.violations.push_back({"progress", "no transition from a non-terminated configuration", tree.path(item.node)});
      continue;
    }
    if (opts.integrity) {
      std::map<IntegrityKey, int> recvs;
      for (const auto& t : cands)
        if (t.rule == "C-Recv" && ++recvs[t.key] > 1)
          res.violations.push_back(
              {"integrity", "two receive transitions consume key " + t.key.to_string(), tree.path(item.node)});
      if (full()) break;
    }
    if (d >= opts.depth) {
      if (!cands.empty()) res.truncated = true;
      continue;
    }
    const auto only = opts.reduce ? commuting_transition(cfg, cands) : std::nullopt;
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const auto& t = cands[k];
      ++res.edges;
      ChorStep next;
      try {
        next = step(cfg, t, prog);
      } catch (const Error& e) {
        res.violations.push_back({"runtime", e.what(), tree.path(item.node, StepRecord{t.rule, t.actor, t.key, {}, 0})});
        break;
      }
      const bool expand = !only || *only == k;
      StepRecord rec{t.rule, t.actor, t.key, next.message, 0};
      std::string key;
      if (expand) {
        key = canonical(next.cfg);
        rec.state_hash = fnv1a64(key);
      }
      auto witness = [&] {
        if (!expand) rec.state_hash = state_hash(next.cfg);
        return tree.path(item.node, rec);
      };
      const LedgerEntry* sent = nullptr;
      if (opts.integrity && t.rule == "C-Send") {
        if (item.ledger.count(t.key))
          res.violations.push_back({"integrity", "key " + t.key.to_string() + " sent twice", witness()});
      } else if (opts.integrity && t.rule == "C-Recv") {
        auto it = item.ledger.find(t.key);
        if (it != item.ledger.end()) sent = &it->second;
        if (!sent || sent->payload != *next.message)
          res.violations.push_back({"integrity",
                                    "receive at " + t.key.to_string() + " bound " + next.message->to_string() +
                                        (!sent ? " with no recorded send" : " but " + sent->payload.to_string() + " was sent"),
                                    witness()});
      }
      if (full()) break;
      if (!expand) continue;
      SendLedger ledger = item.ledger;
      if (opts.integrity && t.rule == "C-Send") {
        const auto& comm = chor_at(cfg.C, t.path).as<chor::Comm>();
        ledger[t.key] = {comm.from, comm.to, comm.var, *next.message, d + 1};
      } else if (opts.integrity && t.rule == "C-Recv") {
        ledger.erase(t.key);
      }
      encode_ledger(key, ledger);
      if (!visited.insert(digest(key)).second) continue;
      if (res.states >= opts.states) {
        res.truncated = true;
        continue;
      }
      ++res.states;
      const std::size_t child = tree.add(item.node, std::move(rec));
      queue.push_back({child, std::move(next.cfg), std::move(ledger)});
    }
  }
  return res;
}

ExplorationResult check_epp_correspondence(const Program& prog, const StateMap& sigma, const ExploreOptions& opts,
                                           const NetOptions& net) {
  ExplorationResult res;
  res.reduced = opts.reduce;
  StateTree tree;
  auto full = [&] { return res.violations.size() >= opts.max_violations; };

  ProjectedProgram projected;
  try {
    projected = project_program(prog);
  } catch (const ProjectionError& e) {
    res.violations.push_back({"epp-projection", e.what(), {}});
    return res;
  }
  const ProcDeclarations& decls = projected.decls;

  ChorConfiguration c0 = initial_configuration(prog, sigma);
  NetConfiguration n0 = initial_net(projected, c0.sigma);
  const std::vector<std::string> procs = process_names(c0.sigma);

  auto related = [&](const ChorConfiguration& c, const NetConfiguration& n) {
    return c.sigma == n.sigma && sorted_bags(c.K) == sorted_bags(n.K) &&
           network_geq(n.N, project_network(c.C, procs, prog.decls));
  };

  struct Item {
    std::size_t node;
    ChorConfiguration c;
    NetConfiguration n;
  };
  std::deque<Item> queue;
  VisitedSet visited;

  const std::size_t root = tree.root();
  if (!related(c0, n0)) {
    res.violations.push_back({"epp-completeness", "initial network is not related to the choreography", {}});
    return res;
  }
  visited.insert(digest(canonical(c0) + "#N" + canonical(n0)));
  queue.push_back({root, std::move(c0), std::move(n0)});
  res.states = 1;

  struct Succ {
    TransitionCandidate t;
    std::optional<ChorStep> c;
    std::optional<NetStep> n;
    Network projected;
  };

  while (!queue.empty() && !full()) {
    Item item = std::move(queue.front());
    queue.pop_front();
    const std::size_t d = tree.depth(item.node);
    res.depth = std::max(res.depth, d);

    std::vector<Succ> cs;
    const auto chor_cands = enabled(item.c, prog);
    const auto only = opts.reduce ? commuting_transition(item.c, chor_cands) : std::nullopt;
    for (const auto& t : chor_cands) {
      Succ s{t, {}, {}, {}};
      try {
        s.c = step(item.c, t, prog);
        s.projected = project_network(s.c->cfg.C, procs, prog.decls);
      } catch (const Error& e) {
        res.violations.push_back({"runtime", e.what(), tree.path(item.node, StepRecord{t.rule, t.actor, t.key, {}, 0})});
        break;
      }
      cs.push_back(std::move(s));
    }
    std::vector<Succ> ns;
    for (const auto& t : enabled_net(item.n, decls, net)) {
      Succ s{t, {}, {}, {}};
      try {
        s.n = step_net(item.n, t, decls, net);
      } catch (const Error& e) {
        res.violations.push_back({"runtime", e.what(), tree.path(item.node, StepRecord{t.rule, t.actor, t.key, {}, 0})});
        break;
      }
      ns.push_back(std::move(s));
    }
    if (full()) break;
    if (d >= opts.depth) {
      if (!cs.empty() || !ns.empty()) res.truncated = true;
      continue;
    }

    std::vector<MessageMap> cbags, nbags;
    for (const auto& c : cs) cbags.push_back(sorted_bags(c.c->cfg.K));
    for (const auto& n : ns) nbags.push_back(sorted_bags(n.n->cfg.K));
    std::vector<signed char> memo(cs.size() * ns.size(), -1);
    auto matches = [&](std::size_t i, std::size_t j) {
      signed char& m = memo[i * ns.size() + j];
      if (m < 0) {
        const Succ& c = cs[i];
        const Succ& n = ns[j];
        m = c.t.actor == n.t.actor && c.c->cfg.sigma == n.n->cfg.sigma && cbags[i] == nbags[j] &&
            network_geq(n.n->cfg.N, c.projected);
      }
      return m == 1;
    };
    auto find_match = [&](std::size_t count, auto&& pred) {
      for (std::size_t k = 0; k < count; ++k)
        if (pred(k)) return k;
      return count;
    };
    auto push = [&](const Succ& c, const Succ& n, const TransitionCandidate& via) {
      const std::string chor_key = canonical(c.c->cfg);
      if (!visited.insert(digest(chor_key + "#N" + canonical(n.n->cfg))).second) return;
      if (res.states >= opts.states) {
        res.truncated = true;
        return;
      }
      ++res.states;
      const std::size_t child =
          tree.add(item.node, StepRecord{via.rule, via.actor, via.key, c.c->message, fnv1a64(chor_key)});
      queue.push_back({child, c.c->cfg, n.n->cfg});
    };

    for (std::size_t i = 0; i < cs.size(); ++i) {
      const Succ& c = cs[i];
      ++res.edges;
      const std::size_t j = find_match(ns.size(), [&](std::size_t k) { return matches(i, k); });
      if (j == ns.size()) {
        res.violations.push_back({"epp-completeness",
                                  "no network step by " + c.t.actor + " matches " + c.t.rule + " at " + c.t.key.to_string(),
                                  tree.path(item.node, StepRecord{c.t.rule, c.t.actor, c.t.key, c.c->message, 0})});
        if (full()) break;
        continue;
      }
      if (!only || *only == i) push(c, ns[j], c.t);
    }
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const Succ& n = ns[j];
      if (full()) break;
      ++res.edges;
      const std::size_t i = find_match(cs.size(), [&](std::size_t k) { return matches(k, j); });
      if (i == cs.size()) {
        res.violations.push_back({"epp-soundness",
                                  "no choreography step by " + n.t.actor + " matches " + n.t.rule + " at " +
                                      n.t.key.to_string(),
                                  tree.path(item.node, StepRecord{n.t.rule, n.t.actor, n.t.key, n.n->message, 0})});
        continue;
      }
      if (!only) push(cs[i], n, n.t);
    }
  }
  return res;
}

CivSearch find_civ(const Program& prog, const StateMap& sigma, KeyMode keys, std::size_t state_cap) {
  CivSearch out;
  const ProjectedProgram projected = project_program(prog);
  NetOptions opts;
  opts.keys = keys;

  using Ledger = std::map<IntegrityKey, Value>;
  auto key_of = [](const NetConfiguration& n, const Ledger& l) {
    std::string k = canonical(n);
    k += "#L";
    for (const auto& [key, v] : l) {
      k += key.to_string();
      encode(k, v);
    }
    return k;
  };

  struct Item {
    std::size_t node;
    NetConfiguration n;
    Ledger ledger;
  };
  StateTree tree;
  std::deque<Item> queue;
  VisitedSet visited;
  NetConfiguration n0 = initial_net(projected, initial_configuration(prog, sigma).sigma);
  visited.insert(digest(key_of(n0, {})));
  queue.push_back({tree.root(), std::move(n0), {}});
  out.states = 1;

  // Shortest witness first; among those, the earliest receive key.
  std::optional<std::size_t> witness_depth;
  while (!queue.empty()) {
    Item item = std::move(queue.front());
    queue.pop_front();
    if (witness_depth && tree.depth(item.node) > *witness_depth) break;
    for (const auto& t : enabled_net(item.n, projected.decls, opts)) {
      NetStep next = step_net(item.n, t, projected.decls, opts);
      StepRecord rec{t.rule, t.actor, t.key, next.message, state_hash(next.cfg)};
      Ledger ledger = item.ledger;
      if (t.rule == "P-Send") ledger[t.key] = *next.message;
      if (t.rule == "P-Recv") {
        const Message& m = item.n.K.at(t.actor)[*t.message];
        if (m.key() != t.key) {
          auto sent = ledger.find(t.key);
          std::optional<Value> expected;
          if (sent != ledger.end()) expected = sent->second;
          if (!expected || *expected != m.payload) {
            const auto& recv = proc_at(item.n.N.at(t.actor), t.path).as<local::Recv>();
            if (!out.witness || t.key < out.witness->receive_key)
              out.witness = CivWitness{tree.path(item.node, rec), t.actor, recv.var, t.key, m.key(), m.payload, expected};
            witness_depth = tree.depth(item.node);
            continue;
          }
        }
      }
      if (witness_depth) continue;
      if (!visited.insert(digest(key_of(next.cfg, ledger))).second) continue;
      if (out.states >= state_cap) {
        out.truncated = true;
        continue;
      }
      ++out.states;
      queue.push_back({tree.add(item.node, std::move(rec)), std::move(next.cfg), std::move(ledger)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Latency simulation

std::optional<double> LatencyResult::first(const std::string& fn) const {
  std::optional<double> best;
  for (const auto& e : events)
    if (e.function == fn && (!best || e.finish < *best)) best = e.finish;
  return best;
}

namespace {

const Expr* evaluated_expr(const ProcInstr& i) {
  if (const auto* x = std::get_if<local::Send>(&i.payload)) return &x->expr;
  if (const auto* x = std::get_if<local::Set>(&i.payload)) return &x->expr;
  if (const auto* x = std::get_if<local::If>(&i.payload)) return &x->guard;
  return nullptr;
}

}  // namespace

LatencyResult latency_sim(const Program& prog, const StateMap& sigma, const LatencyOptions& opts) {
  LatencyResult res;
  const ProjectedProgram projected = project_program(prog);
  NetOptions net;
  net.delay = opts.policy;
  NetConfiguration cur = initial_net(projected, initial_configuration(prog, sigma).sigma);

  std::map<std::string, double> free_at;
  std::map<std::string, std::vector<double>> arrival;
  std::map<std::string, std::size_t> sends;
  for (const auto& [p, s] : cur.sigma) free_at[p] = 0;

  constexpr std::size_t kMaxSteps = 1000000;
  for (std::size_t n = 0; n < kMaxSteps; ++n) {
    const auto cands = enabled_net(cur, projected.decls, net);
    const TransitionCandidate* best = nullptr;
    double best_start = 0;
    double best_finish = std::numeric_limits<double>::infinity();
    std::string best_fn;
    for (const auto& t : cands) {
      double start = free_at[t.actor];
      if (t.message) {
        if (opts.transport == Transport::Fifo && *t.message != 0) continue;
        start = std::max(start, arrival[t.actor][*t.message]);
      }
      const ProcInstr& instr = proc_at(cur.N.at(t.actor), t.path);
      const Expr* e = evaluated_expr(instr);
      const double cost = (e && e->is_app()) ? opts.compute_cost : 0.0;
      const double finish = start + cost;
      const auto rank = std::make_tuple(finish, t.key, t.actor);
      if (!best || rank < std::make_tuple(best_finish, best->key, best->actor)) {
        best = &t;
        best_start = start;
        best_finish = finish;
        best_fn = (e && e->is_app()) ? e->name : std::string();
      }
    }
    if (!best) break;
    const TransitionCandidate t = *best;
    const ProcInstr& instr = proc_at(cur.N.at(t.actor), t.path);
    std::string to;
    if (const auto* s = std::get_if<local::Send>(&instr.payload)) to = s->to;
    if (const auto* s = std::get_if<local::Choose>(&instr.payload)) to = s->to;

    NetStep next = step_net(cur, t, projected.decls, net);
    if (t.message) {
      auto& arr = arrival[t.actor];
      arr.erase(arr.begin() + static_cast<std::ptrdiff_t>(*t.message));
    }
    if (!to.empty()) {
      double delay = opts.send_delay;
      if (t.rule == "P-Send") {
        const std::size_t nth = ++sends[t.actor];
        for (const auto& o : opts.overrides) {
          if (o.key && *o.key == t.key) delay = o.delay;
          if (!o.key && o.sender == t.actor && o.nth == nth) delay = o.delay;
        }
      }
      arrival[to].push_back(best_finish + delay);
    }
    free_at[t.actor] = best_finish;
    res.events.push_back({best_start, best_finish, t.actor, t.rule, t.key, best_fn});
    res.makespan = std::max(res.makespan, best_finish);
    cur = std::move(next.cfg);
  }
  res.completed = is_terminated(cur.N);
  return res;
}

LatencyOptions latency_options_from_json(const nlohmann::json& j) {
  LatencyOptions o;
  if (!j.is_object()) throw ConfigError("delays must be a JSON object");
  if (j.contains("compute")) o.compute_cost = j.at("compute").get<double>();
  if (j.contains("send")) o.send_delay = j.at("send").get<double>();
  if (j.contains("overrides")) {
    for (const auto& x : j.at("overrides")) {
      DelayOverride d;
      d.delay = x.at("delay").get<double>();
      if (x.contains("key")) {
        const auto& k = x.at("key");
        d.key = IntegrityKey{k.at(0).get<int>(), Token{k.at(1).get<std::vector<int>>()}};
      } else {
        d.sender = x.at("sender").get<std::string>();
        d.nth = x.value("nth", std::size_t{1});
      }
      o.overrides.push_back(std::move(d));
    }
  }
  return o;
}

nlohmann::json to_json(const StepRecord& s) {
  return {{"rule", s.rule},
          {"actor", s.actor},
          {"key", to_json(s.key)},
          {"message", s.message ? to_json(*s.message) : nlohmann::json(nullptr)}};
}

nlohmann::json to_json(const ExplorationResult& r) {
  auto vs = nlohmann::json::array();
  for (const auto& v : r.violations) {
    auto w = nlohmann::json::array();
    for (const auto& s : v.witness) w.push_back(to_json(s));
    vs.push_back({{"property", v.property}, {"detail", v.detail}, {"witness", w}});
  }
  return {{"schemaVersion", 1},     {"states", r.states},       {"edges", r.edges},
          {"depth", r.depth},       {"truncated", r.truncated}, {"reduction", r.reduced ? "partial-order" : "none"},
          {"violations", vs}};
}

nlohmann::json to_json(const CivSearch& r) {
  nlohmann::json j = {{"schemaVersion", 1}, {"states", r.states}, {"truncated", r.truncated}, {"witness", nullptr}};
  if (r.witness) {
    const auto& w = *r.witness;
    auto trace = nlohmann::json::array();
    for (const auto& s : w.trace) trace.push_back(to_json(s));
    j["witness"] = {{"process", w.process},
                    {"variable", w.variable},
                    {"receiveKey", to_json(w.receive_key)},
                    {"messageKey", to_json(w.message_key)},
                    {"bound", to_json(w.bound)},
                    {"expected", w.expected ? to_json(*w.expected) : nlohmann::json(nullptr)},
                    {"trace", trace}};
  }
  return j;
}

nlohmann::json to_json(const LatencyResult& r) {
  auto evs = nlohmann::json::array();
  for (const auto& e : r.events)
    evs.push_back({{"start", e.start},
                   {"finish", e.finish},
                   {"process", e.process},
                   {"rule", e.rule},
                   {"key", to_json(e.key)},
                   {"function", e.function.empty() ? nlohmann::json(nullptr) : nlohmann::json(e.function)}});
  return {{"schemaVersion", 1}, {"makespan", r.makespan}, {"completed", r.completed}, {"events", evs}};
}

}  // namespace o3
