#include "o3/serialize.hpp"

#include <algorithm>
#include <cstdio>

namespace o3 {

namespace {

void put_str(std::string& out, const std::string& s) {
  out += std::to_string(s.size());
  out += ':';
  out += s;
}

void put_int(std::string& out, long long i) {
  out += std::to_string(i);
  out += ',';
}

void encode_keyed(std::string& out, int line, const TokenExpr& t) {
  put_int(out, line);
  encode(out, t);
}

}  // namespace

void encode(std::string& out, const Value& v) {
  const auto& s = v.storage();
  switch (s.index()) {
    case 0: out += 'u'; break;
    case 1: out += 'n'; break;
    case 2: out += v.as_bool() ? 'T' : 'F'; break;
    case 3: out += 'i'; put_int(out, v.as_int()); break;
    case 4: out += 's'; put_str(out, v.as_string()); break;
    case 5: out += 'L'; put_str(out, v.label_name()); break;
  }
}

void encode(std::string& out, const Token& t) {
  out += '[';
  for (int l : t.lines) put_int(out, l);
  out += ']';
}

void encode(std::string& out, const TokenExpr& t) {
  if (is_placeholder(t))
    out += 't';
  else
    encode(out, std::get<Token>(t));
}

void encode(std::string& out, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Val:
      out += 'V';
      encode(out, e.value);
      put_str(out, e.proc);
      break;
    case Expr::Kind::Var:
      out += 'X';
      put_str(out, e.proc);
      put_str(out, e.name);
      break;
    case Expr::Kind::App:
      out += 'A';
      put_str(out, e.name);
      out += '(';
      for (const auto& a : e.args) encode(out, a);
      out += ')';
      break;
  }
}

namespace {

void encode_seq(std::string& out, const Choreography& c, bool norm);
void encode_seq(std::string& out, const ProcessBehavior& b, bool norm);

/// Writes the instructions of `c` without braces. With `norm`, the output is
/// the encoding of normalize(c) computed without building it.
void encode_items(std::string& out, const Choreography& c, bool norm) {
  std::size_t last = c.size();
  if (norm)
    while (last > 0 && c[last - 1].is_block() && is_terminated(c[last - 1].as<chor::Block>().body)) --last;
  for (std::size_t n = 0; n < last; ++n) {
    const auto& i = c[n];
    const auto& p = i.payload;
    if (const auto* x = std::get_if<chor::Block>(&p)) {
      if (norm && is_terminated(x->body)) continue;
      if (norm && n + 1 == last) {
        encode_items(out, x->body, true);
        continue;
      }
      out += 'B';
      encode_seq(out, x->body, norm);
      continue;
    }
    encode_keyed(out, i.line, i.token);
    if (const auto* x = std::get_if<chor::Comm>(&p)) {
      out += 'c';
      put_str(out, x->from);
      encode(out, x->expr);
      put_str(out, x->to);
      put_str(out, x->var);
    } else if (const auto* x = std::get_if<chor::CommInProgress>(&p)) {
      out += 'C';
      put_str(out, x->from);
      put_str(out, x->to);
      put_str(out, x->var);
    } else if (const auto* x = std::get_if<chor::Select>(&p)) {
      out += 's';
      put_str(out, x->from);
      put_str(out, x->to);
      put_str(out, x->label);
    } else if (const auto* x = std::get_if<chor::SelectInProgress>(&p)) {
      out += 'S';
      put_str(out, x->from);
      put_str(out, x->to);
      put_str(out, x->label);
    } else if (const auto* x = std::get_if<chor::Compute>(&p)) {
      out += '=';
      put_str(out, x->var);
      put_str(out, x->proc);
      encode(out, x->expr);
    } else if (const auto* x = std::get_if<chor::Cond>(&p)) {
      out += '?';
      encode(out, x->guard);
      put_str(out, x->proc);
      encode_seq(out, x->then_branch, norm);
      encode_seq(out, x->else_branch, norm);
    } else if (const auto* x = std::get_if<chor::Call>(&p)) {
      out += 'k';
      put_str(out, x->procedure);
      for (const auto& r : x->roles) put_str(out, r);
      out += ';';
      for (const auto& a : x->args) encode(out, a);
      out += ';';
    } else if (const auto* x = std::get_if<chor::CallInProgress>(&p)) {
      out += 'K';
      for (const auto& r : x->pending) put_str(out, r);
      out += ';';
      put_str(out, x->procedure);
      for (const auto& r : x->roles) put_str(out, r);
      out += ';';
      for (const auto& a : x->args) encode(out, a);
      out += ';';
      encode_seq(out, x->body, norm);
    }
  }
}

void encode_items(std::string& out, const ProcessBehavior& b, bool norm) {
  std::size_t last = b.size();
  if (norm)
    while (last > 0 && b[last - 1].is<local::Block>() && is_terminated(b[last - 1].as<local::Block>().body)) --last;
  for (std::size_t n = 0; n < last; ++n) {
    const auto& p = b[n].payload;
    if (const auto* x = std::get_if<local::Send>(&p)) {
      out += '!';
      put_str(out, x->to);
      encode_keyed(out, x->line, x->token);
      encode(out, x->expr);
    } else if (const auto* x = std::get_if<local::Recv>(&p)) {
      out += '?';
      put_str(out, x->var);
      encode_keyed(out, x->line, x->token);
      put_str(out, x->sender);
    } else if (const auto* x = std::get_if<local::Set>(&p)) {
      out += '=';
      put_str(out, x->var);
      encode(out, x->expr);
    } else if (const auto* x = std::get_if<local::Choose>(&p)) {
      out += '+';
      put_str(out, x->to);
      encode_keyed(out, x->line, x->token);
      put_str(out, x->label);
    } else if (const auto* x = std::get_if<local::Branch>(&p)) {
      out += '&';
      for (const auto& o : x->options) {
        encode_keyed(out, o.line, o.token);
        put_str(out, o.label);
        encode_seq(out, o.body, norm);
      }
      out += ';';
    } else if (const auto* x = std::get_if<local::If>(&p)) {
      out += 'I';
      encode(out, x->guard);
      encode_seq(out, x->then_branch, norm);
      encode_seq(out, x->else_branch, norm);
    } else if (const auto* x = std::get_if<local::Call>(&p)) {
      out += 'k';
      put_str(out, x->procedure);
      for (const auto& r : x->procs) put_str(out, r);
      out += ';';
      for (const auto& a : x->args) encode(out, a);
      out += ';';
      encode_keyed(out, x->line, x->token);
    } else if (const auto* x = std::get_if<local::Block>(&p)) {
      if (norm && is_terminated(x->body)) continue;
      if (norm && n + 1 == last) {
        encode_items(out, x->body, true);
        continue;
      }
      out += 'B';
      encode_seq(out, x->body, norm);
    }
  }
}

void encode_seq(std::string& out, const Choreography& c, bool norm) {
  out += '{';
  encode_items(out, c, norm);
  out += '}';
}

void encode_seq(std::string& out, const ProcessBehavior& b, bool norm) {
  out += '{';
  encode_items(out, b, norm);
  out += '}';
}

}  // namespace

void encode(std::string& out, const Choreography& c) { encode_seq(out, c, false); }
void encode(std::string& out, const ProcessBehavior& b) { encode_seq(out, b, false); }
void encode_normal(std::string& out, const Choreography& c) { encode_seq(out, c, true); }
void encode_normal(std::string& out, const ProcessBehavior& b) { encode_seq(out, b, true); }

void encode(std::string& out, const ProcState& s) {
  out += '<';
  for (const auto& [k, v] : s.store) {
    put_str(out, k);
    encode(out, v);
  }
  out += '|';
  put_int(out, s.counter);
  for (const auto& [k, vs] : s.logs) {
    put_str(out, k);
    out += '[';
    for (const auto& v : vs) encode(out, v);
    out += ']';
  }
  out += '>';
}

void encode(std::string& out, const StateMap& sigma) {
  out += '(';
  for (const auto& [p, s] : sigma) {
    put_str(out, p);
    encode(out, s);
  }
  out += ')';
}

void encode(std::string& out, const MessageMap& K) {
  out += '(';
  for (const auto& [p, bag] : K) {
    put_str(out, p);
    std::vector<std::string> items;
    items.reserve(bag.size());
    for (const auto& m : bag) {
      std::string s;
      put_int(s, m.line);
      encode(s, m.token);
      encode(s, m.payload);
      put_str(s, m.sender);
      items.push_back(std::move(s));
    }
    std::sort(items.begin(), items.end());
    out += '[';
    for (const auto& s : items) out += s;
    out += ']';
  }
  out += ')';
}

std::string canonical(const ChorConfiguration& cfg) {
  std::string out;
  out.reserve(256);
  encode_normal(out, cfg.C);
  encode(out, cfg.sigma);
  encode(out, cfg.K);
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t state_hash(const ChorConfiguration& cfg) { return fnv1a64(canonical(cfg)); }

nlohmann::json to_json(const Value& v) {
  using nlohmann::json;
  switch (v.storage().index()) {
    case 0: return json{{"unit", true}};
    case 1: return nullptr;
    case 2: return v.as_bool();
    case 3: return v.as_int();
    case 4: return v.as_string();
    default: return json{{"label", v.label_name()}};
  }
}

nlohmann::json to_json(const IntegrityKey& k) { return nlohmann::json::array({k.line, k.token.lines}); }

nlohmann::json to_json(const ProcState& s) {
  nlohmann::json store = nlohmann::json::object();
  for (const auto& [k, v] : s.store) store[k] = to_json(v);
  nlohmann::json logs = nlohmann::json::object();
  for (const auto& [k, vs] : s.logs) {
    auto arr = nlohmann::json::array();
    for (const auto& v : vs) arr.push_back(to_json(v));
    logs[k] = arr;
  }
  return {{"store", store}, {"counter", s.counter}, {"logs", logs}};
}

nlohmann::json to_json(const WfReport& r) {
  auto vs = nlohmann::json::array();
  for (const auto& v : r.violations) vs.push_back({{"rule", v.rule}, {"where", v.where}, {"message", v.message}});
  return {{"schemaVersion", 1}, {"wellFormed", r.ok()}, {"violations", vs}};
}

std::string emit_trace_json(const Trace& t, const nlohmann::json& header_extra) {
  nlohmann::json header = {{"schemaVersion", 1}, {"steps", t.steps.size()}, {"terminated", t.terminated}};
  for (const auto& [k, v] : header_extra.items()) header[k] = v;
  std::string out = header.dump() + "\n";
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    nlohmann::json line = {{"step", i + 1},
                           {"rule", s.rule},
                           {"actor", s.actor},
                           {"key", to_json(s.key)},
                           {"message", s.message ? to_json(*s.message) : nlohmann::json(nullptr)},
                           {"stateHash", hex64(s.state_hash)}};
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace o3
