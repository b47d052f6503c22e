#pragma once

#include <set>
#include <string>

#include "o3/errors.hpp"
#include "o3/syntax.hpp"

namespace o3 {

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message, std::set<std::string> expected = {});

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::string detail_;
  std::set<std::string> expected_;
};

/// Parses a `.chor` source. Keyed instructions are numbered 1, 2, ... in
/// source order; declaration bodies get the placeholder token, `main` gets
/// the initial token.
Program parse_program(const std::string& text, const std::string& name = "main");

struct RenderOptions {
  bool show_keys = false;  // trailing `// (l,t)` comments
};

std::string render_expr(const Expr& e, const std::string& context = {});
std::string render_chor(const Choreography& c, const RenderOptions& opts = {}, int indent = 0);
std::string render_program(const Program& p, const RenderOptions& opts = {});
std::string render_proc(const ProcessBehavior& p, int indent = 0);
std::string render_proc_decl(const ProcProcedureDecl& d);

}  // namespace o3
