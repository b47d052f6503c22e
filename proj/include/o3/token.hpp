#pragma once

#include <compare>
#include <string>
#include <variant>
#include <vector>

namespace o3 {

/// Session token: the call-site line numbers of the enclosing invocations,
/// innermost first. The initial token is the empty list.
struct Token {
  std::vector<int> lines;

  auto operator<=>(const Token&) const = default;
  std::string to_string() const;
};

/// The token placeholder `t` used inside procedure declarations.
struct Placeholder {
  auto operator<=>(const Placeholder&) const = default;
};

using TokenExpr = std::variant<Placeholder, Token>;

inline bool is_placeholder(const TokenExpr& t) { return std::holds_alternative<Placeholder>(t); }
std::string to_string(const TokenExpr& t);

/// Returns the concrete token or throws PlaceholderToken.
const Token& concrete(const TokenExpr& t);

struct IntegrityKey {
  int line = 0;
  Token token;

  auto operator<=>(const IntegrityKey&) const = default;

  /// line :: token
  std::vector<int> flatten() const;
  std::string to_string() const;
};

/// nextToken(l, tau) = l :: tau
Token next_token(int line, const Token& token);

// Keys are compared outermost call first, so a call's key is a prefix of the
// keys of every instruction in the body it spawns.
bool is_prefix(const IntegrityKey& k1, const IntegrityKey& k2);
bool strict_prefix(const IntegrityKey& k1, const IntegrityKey& k2);
bool disjoint(const IntegrityKey& k1, const IntegrityKey& k2);

}  // namespace o3
