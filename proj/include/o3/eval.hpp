#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "o3/syntax.hpp"
#include "o3/value.hpp"

namespace o3 {

/// Local state of one process: a key/value store, a counter stream and
/// append-only logs (`consumed`, `display`, `decrypt`).
struct ProcState {
  std::map<std::string, Value> store;
  std::int64_t counter = 0;
  std::map<std::string, std::vector<Value>> logs;

  auto operator<=>(const ProcState&) const = default;
};

using Builtin = std::function<Value(ProcState&, const std::vector<Value>&)>;

class BuiltinRegistry {
 public:
  struct Entry {
    int arity = 0;
    Builtin fn;
  };

  /// Throws DuplicateBuiltin if `name` is already registered.
  void add(const std::string& name, int arity, Builtin fn);
  const Entry* find(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Entry> entries_;
};

/// Every builtin the corpus relies on.
BuiltinRegistry register_builtins();
const BuiltinRegistry& default_builtins();

/// Innermost-leftmost evaluation of a closed expression. Atoms must be values.
std::pair<Value, ProcState> eval(const ProcState& sigma, const Expr& e,
                                 const BuiltinRegistry& builtins = default_builtins());

/// Guard evaluation: must yield a boolean.
std::pair<bool, ProcState> eval_guard(const ProcState& sigma, const Expr& e,
                                      const BuiltinRegistry& builtins = default_builtins());

}  // namespace o3
