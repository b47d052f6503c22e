#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>

namespace o3 {

struct Unit {
  auto operator<=>(const Unit&) const = default;
};

struct Null {
  auto operator<=>(const Null&) const = default;
};

/// A selection label such as `MORE`. Labels travel as message payloads.
struct Label {
  std::string name;
  auto operator<=>(const Label&) const = default;
};

/// Immutable runtime value: integer, boolean, string, unit, null or label.
class Value {
 public:
  using Storage = std::variant<Unit, Null, bool, std::int64_t, std::string, Label>;

  Value() : storage_(Unit{}) {}

  static Value unit() { return Value(Unit{}); }
  static Value null() { return Value(Null{}); }
  static Value boolean(bool b) { return Value(b); }
  static Value integer(std::int64_t i) { return Value(i); }
  static Value string(std::string s) { return Value(std::move(s)); }
  static Value label(std::string name) { return Value(Label{std::move(name)}); }

  bool is_unit() const { return std::holds_alternative<Unit>(storage_); }
  bool is_null() const { return std::holds_alternative<Null>(storage_); }
  bool is_bool() const { return std::holds_alternative<bool>(storage_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(storage_); }
  bool is_string() const { return std::holds_alternative<std::string>(storage_); }
  bool is_label() const { return std::holds_alternative<Label>(storage_); }

  bool as_bool() const { return std::get<bool>(storage_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(storage_); }
  const std::string& as_string() const { return std::get<std::string>(storage_); }
  const std::string& label_name() const { return std::get<Label>(storage_).name; }

  const Storage& storage() const { return storage_; }

  /// Human readable form; strings are quoted, labels printed bare.
  std::string to_string() const;

  auto operator<=>(const Value&) const = default;

 private:
  template <class T>
  explicit Value(T v) : storage_(std::move(v)) {}

  Storage storage_;
};

}  // namespace o3
