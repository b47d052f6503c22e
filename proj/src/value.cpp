#include "o3/value.hpp"

#include <json.hpp>

namespace o3 {

std::string Value::to_string() const {
  struct Visitor {
    std::string operator()(Unit) const { return "()"; }
    std::string operator()(Null) const { return "null"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const std::string& s) const { return nlohmann::json(s).dump(); }
    std::string operator()(const Label& l) const { return l.name; }
  };
  return std::visit(Visitor{}, storage_);
}

}  // namespace o3
