#include "o3/eval.hpp"

#include "o3/errors.hpp"

namespace o3 {

void BuiltinRegistry::add(const std::string& name, int arity, Builtin fn) {
  if (!entries_.emplace(name, Entry{arity, std::move(fn)}).second) throw DuplicateBuiltin(name);
}

const BuiltinRegistry::Entry* BuiltinRegistry::find(const std::string& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> BuiltinRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

namespace {

std::int64_t want_int(const std::string& fn, const Value& v) {
  if (!v.is_int()) throw TypeErrorAtRuntime(fn + " expects an integer, got " + v.to_string());
  return v.as_int();
}

bool want_bool(const std::string& fn, const Value& v) {
  if (!v.is_bool()) throw TypeErrorAtRuntime(fn + " expects a boolean, got " + v.to_string());
  return v.as_bool();
}

std::string key_of(const Value& v) { return v.is_string() ? v.as_string() : v.to_string(); }

template <class Op>
Builtin int_op(std::string name, Op op) {
  return [name = std::move(name), op](ProcState&, const std::vector<Value>& a) {
    return Value::integer(op(want_int(name, a[0]), want_int(name, a[1])));
  };
}

template <class Op>
Builtin cmp_op(std::string name, Op op) {
  return [name = std::move(name), op](ProcState&, const std::vector<Value>& a) {
    return Value::boolean(op(want_int(name, a[0]), want_int(name, a[1])));
  };
}

// Mixes a value into a deterministic result; strings are wrapped so the
// provenance of a payload stays visible in traces.
Value tagged(const std::string& fn, const Value& v, std::int64_t mul, std::int64_t add) {
  if (v.is_int()) return Value::integer(v.as_int() * mul + add);
  return Value::string(fn + "(" + key_of(v) + ")");
}

Builtin logger(const std::string& log) {
  return [log](ProcState& s, const std::vector<Value>& a) {
    s.logs[log].push_back(a[0]);
    return Value::unit();
  };
}

}  // namespace

BuiltinRegistry register_builtins() {
  BuiltinRegistry r;
  r.add("+", 2, int_op("+", [](auto x, auto y) { return x + y; }));
  r.add("-", 2, int_op("-", [](auto x, auto y) { return x - y; }));
  r.add("*", 2, int_op("*", [](auto x, auto y) { return x * y; }));
  r.add("<", 2, cmp_op("<", [](auto x, auto y) { return x < y; }));
  r.add(">", 2, cmp_op(">", [](auto x, auto y) { return x > y; }));
  r.add("<=", 2, cmp_op("<=", [](auto x, auto y) { return x <= y; }));
  r.add(">=", 2, cmp_op(">=", [](auto x, auto y) { return x >= y; }));
  r.add("==", 2, [](ProcState&, const std::vector<Value>& a) { return Value::boolean(a[0] == a[1]); });
  r.add("!=", 2, [](ProcState&, const std::vector<Value>& a) { return Value::boolean(a[0] != a[1]); });
  r.add("not", 1, [](ProcState&, const std::vector<Value>& a) { return Value::boolean(!want_bool("not", a[0])); });
  r.add("and", 2, [](ProcState&, const std::vector<Value>& a) {
    return Value::boolean(want_bool("and", a[0]) && want_bool("and", a[1]));
  });
  r.add("or", 2, [](ProcState&, const std::vector<Value>& a) {
    return Value::boolean(want_bool("or", a[0]) || want_bool("or", a[1]));
  });
  r.add("concat", 2, [](ProcState&, const std::vector<Value>& a) { return Value::string(key_of(a[0]) + key_of(a[1])); });

  r.add("load", 1, [](ProcState& s, const std::vector<Value>& a) {
    auto it = s.store.find(key_of(a[0]));
    return it == s.store.end() ? Value::null() : it->second;
  });
  r.add("store", 2, [](ProcState& s, const std::vector<Value>& a) {
    s.store[key_of(a[0])] = a[1];
    return Value::unit();
  });

  r.add("produce", 0, [](ProcState& s, const std::vector<Value>&) { return Value::integer(s.counter++); });
  r.add("consume", 1, logger("consumed"));
  r.add("display", 1, logger("display"));
  r.add("decrypt", 1, logger("decrypt"));
  r.add("getText", 0, [](ProcState& s, const std::vector<Value>&) {
    return Value::string("text-" + std::to_string(s.counter++));
  });
  r.add("getKey", 0, [](ProcState& s, const std::vector<Value>&) {
    return Value::string("key-" + std::to_string(s.counter++));
  });

  r.add("sell", 1, [](ProcState& s, const std::vector<Value>& a) {
    auto it = s.store.find("stock");
    if (it == s.store.end() || !it->second.is_int() || it->second.as_int() <= 0) return Value::null();
    it->second = Value::integer(it->second.as_int() - 1);
    return a[0];
  });
  r.add("itemsLeft", 0, [](ProcState& s, const std::vector<Value>&) {
    auto it = s.store.find("remaining");
    if (it == s.store.end() || !it->second.is_int()) return Value::integer(0);
    const std::int64_t left = it->second.as_int();
    if (left > 0) it->second = Value::integer(left - 1);
    return Value::integer(left);
  });

  r.add("transform", 1, [](ProcState&, const std::vector<Value>& a) { return tagged("transform", a[0], 3, 1); });
  r.add("process", 1, [](ProcState&, const std::vector<Value>& a) { return tagged("process", a[0], 7, 2); });
  r.add("compute", 1, [](ProcState&, const std::vector<Value>& a) { return tagged("compute", a[0], 2, 1); });
  return r;
}

const BuiltinRegistry& default_builtins() {
  static const BuiltinRegistry registry = register_builtins();
  return registry;
}

namespace {

Value eval_in_place(ProcState& sigma, const Expr& e, const BuiltinRegistry& builtins) {
  switch (e.kind) {
    case Expr::Kind::Val:
      return e.value;
    case Expr::Kind::Var:
      throw OpenExpression("variable '" + (e.proc.empty() ? e.name : e.proc + "." + e.name) + "' is unbound");
    case Expr::Kind::App:
      break;
  }
  const auto* entry = builtins.find(e.name);
  if (entry == nullptr) throw UnknownBuiltin(e.name);
  if (static_cast<int>(e.args.size()) != entry->arity)
    throw ArityError(e.name + " takes " + std::to_string(entry->arity) + " arguments, got " +
                     std::to_string(e.args.size()));
  std::vector<Value> args;
  args.reserve(e.args.size());
  for (const auto& a : e.args) args.push_back(eval_in_place(sigma, a, builtins));
  return entry->fn(sigma, args);
}

}  // namespace

std::pair<Value, ProcState> eval(const ProcState& sigma, const Expr& e, const BuiltinRegistry& builtins) {
  if (!closed(e)) throw OpenExpression("expression has free variables");
  ProcState out = sigma;
  Value v = eval_in_place(out, e, builtins);
  return {std::move(v), std::move(out)};
}

std::pair<bool, ProcState> eval_guard(const ProcState& sigma, const Expr& e, const BuiltinRegistry& builtins) {
  auto [v, s] = eval(sigma, e, builtins);
  if (!v.is_bool()) throw TypeErrorAtRuntime("guard evaluated to " + v.to_string());
  return {v.as_bool(), std::move(s)};
}

}  // namespace o3
