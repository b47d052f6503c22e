#pragma once

#include <stdexcept>
#include <string>

namespace o3 {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define O3_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

O3_DEFINE_ERROR(ArityMismatch)
O3_DEFINE_ERROR(LocationMismatch)
O3_DEFINE_ERROR(UnknownBuiltin)
O3_DEFINE_ERROR(ArityError)
O3_DEFINE_ERROR(TypeErrorAtRuntime)
O3_DEFINE_ERROR(OpenExpression)
O3_DEFINE_ERROR(DuplicateBuiltin)
O3_DEFINE_ERROR(IllegalTransition)
O3_DEFINE_ERROR(AmbiguousMessage)
O3_DEFINE_ERROR(PlaceholderToken)
O3_DEFINE_ERROR(DuplicateProcedureName)
O3_DEFINE_ERROR(UnknownProcedure)
O3_DEFINE_ERROR(LabelAsVariable)
O3_DEFINE_ERROR(ConfigError)

#undef O3_DEFINE_ERROR

}  // namespace o3
