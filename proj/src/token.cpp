#include "o3/token.hpp"

#include <algorithm>

#include "o3/errors.hpp"

namespace o3 {

std::string Token::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i != 0) out += ",";
    out += std::to_string(lines[i]);
  }
  return out + "]";
}

std::string to_string(const TokenExpr& t) {
  if (is_placeholder(t)) return "t";
  return std::get<Token>(t).to_string();
}

const Token& concrete(const TokenExpr& t) {
  if (is_placeholder(t)) throw PlaceholderToken("token placeholder reached the runtime");
  return std::get<Token>(t);
}

std::vector<int> IntegrityKey::flatten() const {
  std::vector<int> out;
  out.reserve(token.lines.size() + 1);
  out.push_back(line);
  out.insert(out.end(), token.lines.begin(), token.lines.end());
  return out;
}

std::string IntegrityKey::to_string() const {
  return "(" + std::to_string(line) + "," + token.to_string() + ")";
}

Token next_token(int line, const Token& token) {
  Token out;
  out.lines.reserve(token.lines.size() + 1);
  out.lines.push_back(line);
  out.lines.insert(out.lines.end(), token.lines.begin(), token.lines.end());
  return out;
}

bool is_prefix(const IntegrityKey& k1, const IntegrityKey& k2) {
  const auto& a = k1.token.lines;
  const auto& b = k2.token.lines;
  if (a.size() > b.size()) return false;
  // Outermost first: a's token must be the tail of b's, then a's line follows.
  if (!std::equal(a.rbegin(), a.rend(), b.rbegin())) return false;
  const int next = a.size() < b.size() ? b[b.size() - a.size() - 1] : k2.line;
  return k1.line == next;
}

bool strict_prefix(const IntegrityKey& k1, const IntegrityKey& k2) {
  return k1.token.lines.size() < k2.token.lines.size() && is_prefix(k1, k2);
}

bool disjoint(const IntegrityKey& k1, const IntegrityKey& k2) {
  return !(k1 == k2) && !is_prefix(k1, k2) && !is_prefix(k2, k1);
}

}  // namespace o3
