#include "o3/parser.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include <json.hpp>

namespace o3 {

ParseError::ParseError(int line, int column, const std::string& message, std::set<std::string> expected)
    : Error("ParseError", std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message),
      expected_(std::move(expected)) {}

namespace {

enum class Tok { Ident, Int, String, Punct, End };

struct Lexeme {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

std::vector<Lexeme> lex(const std::string& src) {
  std::vector<Lexeme> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const char* const two_char[] = {"->", "==", "!=", "<=", ">=", "&&", "||"};
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Lexeme lx;
    lx.line = line;
    lx.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      lx.kind = Tok::Ident;
      lx.text = src.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      lx.kind = Tok::Int;
      lx.text = src.substr(i, j - i);
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      std::string raw = "\"";
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\n') throw ParseError(line, col, "unterminated string literal");
        if (src[j] == '\\' && j + 1 < src.size()) raw += src[j++];
        raw += src[j++];
      }
      if (j >= src.size()) throw ParseError(line, col, "unterminated string literal");
      raw += '"';
      try {
        lx.text = nlohmann::json::parse(raw).get<std::string>();
      } catch (const nlohmann::json::exception&) {
        throw ParseError(line, col, "malformed string literal");
      }
      lx.kind = Tok::String;
      advance(j + 1 - i);
    } else {
      lx.kind = Tok::Punct;
      for (const char* op : two_char) {
        if (src.compare(i, 2, op) == 0) lx.text = op;
      }
      if (lx.text.empty()) {
        if (std::string("(){}[],;.=<>+-*!@").find(c) == std::string::npos)
          throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        lx.text = std::string(1, c);
      }
      advance(lx.text.size());
    }
    out.push_back(std::move(lx));
  }
  Lexeme end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

const std::set<std::string> kKeywords = {"proc", "main", "if", "else", "true", "false", "null", "unit"};

class Parser {
 public:
  explicit Parser(std::vector<Lexeme> toks) : toks_(std::move(toks)) {}

  Program program(const std::string& name) {
    Program prog;
    prog.name = name;
    while (is_ident("proc")) prog.decls.push_back(decl());
    expect_ident("main");
    in_decl_ = false;
    prog.main = block_body();
    if (peek().kind != Tok::End) fail("expected end of input", {"<end>"});
    prog.labels = labels_;
    resolve(prog);
    return prog;
  }

 private:
  const Lexeme& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Lexeme& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  bool is_punct(const std::string& p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool is_ident(const std::string& w, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == w;
  }

  [[noreturn]] void fail(const std::string& msg, std::set<std::string> expected = {}) const {
    const auto& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.column, msg + ", found " + found, std::move(expected));
  }

  void expect(const std::string& p) {
    if (!is_punct(p)) fail("expected '" + p + "'", {p});
    ++pos_;
  }
  void expect_ident(const std::string& w) {
    if (!is_ident(w)) fail("expected '" + w + "'", {w});
    ++pos_;
  }
  std::string name(const std::string& what) {
    if (peek().kind != Tok::Ident || kKeywords.count(peek().text) != 0) fail("expected " + what, {what});
    return next().text;
  }

  TokenExpr token() const { return in_decl_ ? TokenExpr{Placeholder{}} : TokenExpr{Token{}}; }
  int fresh_line() { return ++line_; }

  ProcedureDecl decl() {
    expect_ident("proc");
    ProcedureDecl d;
    d.name = name("procedure name");
    expect("(");
    if (!is_punct(";") && !is_punct(")")) {
      d.roles.push_back(name("role"));
      while (is_punct(",")) {
        ++pos_;
        d.roles.push_back(name("role"));
      }
    }
    if (is_punct(";")) {
      ++pos_;
      if (!is_punct(")")) {
        do {
          if (is_punct(",")) ++pos_;
          LocatedVar v;
          v.proc = name("role");
          expect(".");
          v.name = name("parameter name");
          vars_.insert(v.name);
          d.params.push_back(v);
        } while (is_punct(","));
      }
    }
    expect(")");
    in_decl_ = true;
    d.body = block_body();
    return d;
  }

  Choreography block_body() {
    expect("{");
    Choreography c;
    while (!is_punct("}")) {
      if (peek().kind == Tok::End) fail("unterminated block", {"}"});
      c.push_back(instr());
    }
    expect("}");
    return c;
  }

  ChorInstr instr() {
    if (is_punct("{")) return ChorInstr::block(block_body());
    if (is_ident("if")) {
      ++pos_;
      const int line = fresh_line();
      chor::Cond cond;
      cond.proc = name("process");
      expect(".");
      cond.guard = expr(cond.proc);
      cond.then_branch = block_body();
      if (is_ident("else")) {
        ++pos_;
        cond.else_branch = block_body();
      }
      return ChorInstr(line, token(), std::move(cond));
    }
    if (peek().kind != Tok::Ident || kKeywords.count(peek().text) != 0)
      fail("expected an instruction", {"{", "if", "<process>", "<procedure>"});
    if (is_punct("(", 1)) return call();
    if (is_punct("->", 1)) {
      const int line = fresh_line();
      chor::Select s;
      s.from = next().text;
      ++pos_;
      s.to = name("process");
      expect("[");
      s.label = name("label");
      labels_.insert(s.label);
      expect("]");
      expect(";");
      return ChorInstr(line, token(), std::move(s));
    }
    if (!is_punct(".", 1)) fail("expected '.', '->' or '(' after identifier", {".", "->", "("});
    const int line = fresh_line();
    const std::string p = next().text;
    ++pos_;  // '.'
    if (peek().kind == Tok::Ident && is_punct("=", 1)) {
      chor::Compute c;
      c.proc = p;
      c.var = next().text;
      vars_.insert(c.var);
      ++pos_;
      c.expr = expr(p);
      expect(";");
      return ChorInstr(line, token(), std::move(c));
    }
    Expr e = expr(p);
    if (is_punct("->")) {
      ++pos_;
      chor::Comm c;
      c.from = p;
      c.expr = std::move(e);
      c.to = name("process");
      expect(".");
      c.var = name("variable");
      vars_.insert(c.var);
      expect(";");
      return ChorInstr(line, token(), std::move(c));
    }
    expect(";");
    return ChorInstr(line, token(), chor::Compute{"_", p, std::move(e)});
  }

  ChorInstr call() {
    const int line = fresh_line();
    chor::Call c;
    const auto& head = peek();
    c.procedure = next().text;
    call_sites_.push_back({head.line, head.column});
    expect("(");
    if (!is_punct(";") && !is_punct(")")) {
      c.roles.push_back(name("process"));
      while (is_punct(",")) {
        ++pos_;
        c.roles.push_back(name("process"));
      }
    }
    if (is_punct(";")) {
      ++pos_;
      if (!is_punct(")")) {
        c.args.push_back(call_arg());
        while (is_punct(",")) {
          ++pos_;
          c.args.push_back(call_arg());
        }
      }
    }
    expect(")");
    expect(";");
    return ChorInstr(line, token(), std::move(c));
  }

  Expr call_arg() {
    if (peek().kind == Tok::Ident && kKeywords.count(peek().text) == 0 && is_punct(".", 1)) {
      std::string p = next().text;
      ++pos_;
      std::string x = name("variable");
      vars_.insert(x);
      return Expr::var(std::move(p), std::move(x));
    }
    Value v = literal();
    if (is_punct("@")) {
      ++pos_;
      return Expr::val(std::move(v), name("process"));
    }
    return Expr::val(std::move(v));  // located once the callee is known
  }

  bool at_literal() const {
    const auto& t = peek();
    if (t.kind == Tok::Int || t.kind == Tok::String) return true;
    if (t.kind == Tok::Punct && t.text == "-" && peek(1).kind == Tok::Int) return true;
    return t.kind == Tok::Ident &&
           (t.text == "true" || t.text == "false" || t.text == "null" || t.text == "unit");
  }

  Value literal() {
    const auto& t = peek();
    if (t.kind == Tok::Punct && t.text == "-" && peek(1).kind == Tok::Int) {
      ++pos_;
      return Value::integer(-std::stoll(next().text));
    }
    if (t.kind == Tok::Int) return Value::integer(std::stoll(next().text));
    if (t.kind == Tok::String) return Value::string(next().text);
    if (is_ident("true")) return ++pos_, Value::boolean(true);
    if (is_ident("false")) return ++pos_, Value::boolean(false);
    if (is_ident("null")) return ++pos_, Value::null();
    if (is_ident("unit")) return ++pos_, Value::unit();
    fail("expected a literal", {"<int>", "<string>", "true", "false", "null", "unit"});
  }

  // Expressions: || < && < comparisons < + - < * < unary
  Expr expr(const std::string& at) { return binary(at, 0); }

  Expr binary(const std::string& at, int level) {
    static const std::vector<std::vector<std::pair<std::string, std::string>>> levels = {
        {{"||", "or"}},
        {{"&&", "and"}},
        {{"==", "=="}, {"!=", "!="}, {"<=", "<="}, {">=", ">="}, {"<", "<"}, {">", ">"}},
        {{"+", "+"}, {"-", "-"}},
        {{"*", "*"}},
    };
    if (level == static_cast<int>(levels.size())) return unary(at);
    Expr lhs = binary(at, level + 1);
    for (;;) {
      const std::string* fn = nullptr;
      for (const auto& [sym, f] : levels[level])
        if (is_punct(sym)) fn = &f;
      if (fn == nullptr) return lhs;
      ++pos_;
      Expr rhs = binary(at, level + 1);
      lhs = Expr::app(*fn, {std::move(lhs), std::move(rhs)});
    }
  }

  Expr unary(const std::string& at) {
    if (is_punct("!")) {
      ++pos_;
      return Expr::app("not", {unary(at)});
    }
    return atom(at);
  }

  Expr atom(const std::string& at) {
    if (is_punct("(")) {
      ++pos_;
      Expr e = expr(at);
      expect(")");
      return e;
    }
    if (at_literal()) {
      Value v = literal();
      if (is_punct("@")) {
        ++pos_;
        return Expr::val(std::move(v), name("process"));
      }
      return Expr::val(std::move(v), at);
    }
    if (peek().kind != Tok::Ident || kKeywords.count(peek().text) != 0)
      fail("expected an expression", {"<literal>", "<variable>", "<function>", "("});
    std::string id = next().text;
    if (is_punct("(")) {
      ++pos_;
      std::vector<Expr> args;
      if (!is_punct(")")) {
        args.push_back(expr(at));
        while (is_punct(",")) {
          ++pos_;
          args.push_back(expr(at));
        }
      }
      expect(")");
      return Expr::app(std::move(id), std::move(args));
    }
    if (is_punct(".")) {
      ++pos_;
      std::string x = name("variable");
      vars_.insert(x);
      return Expr::var(std::move(id), std::move(x));
    }
    vars_.insert(id);
    return Expr::var(at, std::move(id));
  }

  void resolve_calls(Choreography& c, const Program& prog, std::size_t& site) {
    for (auto& i : c) {
      if (auto* b = std::get_if<chor::Block>(&i.payload)) {
        resolve_calls(b->body, prog, site);
      } else if (auto* s = std::get_if<chor::Cond>(&i.payload)) {
        resolve_calls(s->then_branch, prog, site);
        resolve_calls(s->else_branch, prog, site);
      } else if (auto* s = std::get_if<chor::Call>(&i.payload)) {
        const auto [line, col] = call_sites_[site++];
        const auto* d = prog.find(s->procedure);
        if (d == nullptr) throw UnknownProcedure(std::to_string(line) + ":" + std::to_string(col) + ": " + s->procedure);
        for (std::size_t j = 0; j < s->args.size() && j < d->params.size(); ++j) {
          auto& a = s->args[j];
          if (!a.is_val() || !a.proc.empty()) continue;
          for (std::size_t r = 0; r < d->roles.size() && r < s->roles.size(); ++r)
            if (d->roles[r] == d->params[j].proc) a.proc = s->roles[r];
        }
      }
    }
  }

  void resolve(Program& prog) {
    std::set<std::string> seen;
    for (const auto& d : prog.decls)
      if (!seen.insert(d.name).second) throw DuplicateProcedureName(d.name);
    std::size_t site = 0;
    for (auto& d : prog.decls) resolve_calls(d.body, prog, site);
    resolve_calls(prog.main, prog, site);
    for (const auto& l : labels_)
      if (vars_.count(l) != 0) throw LabelAsVariable(l);
  }

  std::vector<Lexeme> toks_;
  std::size_t pos_ = 0;
  int line_ = 0;
  bool in_decl_ = true;
  std::set<std::string> labels_;
  std::set<std::string> vars_;
  std::vector<std::pair<int, int>> call_sites_;
};

// ---------------------------------------------------------------------------
// Rendering

const std::map<std::string, std::string> kInfix = {
    {"or", "||"}, {"and", "&&"}, {"==", "=="}, {"!=", "!="}, {"<=", "<="}, {">=", ">="},
    {"<", "<"},   {">", ">"},    {"+", "+"},   {"-", "-"},   {"*", "*"},
};

std::string literal_text(const Value& v) { return v.is_unit() ? "unit" : v.to_string(); }

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

std::string key_comment(const ChorInstr& i, const RenderOptions& opts) {
  if (!opts.show_keys) return "";
  return "  // (" + std::to_string(i.line) + "," + to_string(i.token) + ")";
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i == 0 ? "" : ", ") + xs[i];
  return out;
}

std::string render_args(const std::vector<Expr>& args, const std::string& context) {
  std::vector<std::string> parts;
  for (const auto& a : args) parts.push_back(render_expr(a, context));
  return join(parts);
}

std::string render_call_arg(const Expr& a) {
  if (a.is_val()) return literal_text(a.value) + (a.proc.empty() ? "" : "@" + a.proc);
  return render_expr(a, "");
}

std::string render_call_args(const std::vector<Expr>& args) {
  std::vector<std::string> parts;
  for (const auto& a : args) parts.push_back(render_call_arg(a));
  return join(parts);
}

std::string key_text(int line, const TokenExpr& t) { return "@(" + std::to_string(line) + "," + to_string(t) + ")"; }

}  // namespace

Program parse_program(const std::string& text, const std::string& name) {
  return Parser(lex(text)).program(name);
}

std::string render_expr(const Expr& e, const std::string& context) {
  switch (e.kind) {
    case Expr::Kind::Val:
      return literal_text(e.value) + (e.proc == context ? "" : "@" + e.proc);
    case Expr::Kind::Var:
      return e.proc == context ? e.name : e.proc + "." + e.name;
    case Expr::Kind::App:
      break;
  }
  auto it = kInfix.find(e.name);
  if (it != kInfix.end() && e.args.size() == 2)
    return "(" + render_expr(e.args[0], context) + " " + it->second + " " + render_expr(e.args[1], context) + ")";
  if (e.name == "not" && e.args.size() == 1) return "!" + render_expr(e.args[0], context);
  return e.name + "(" + render_args(e.args, context) + ")";
}

std::string render_chor(const Choreography& c, const RenderOptions& opts, int indent) {
  std::ostringstream out;
  for (const auto& i : c) {
    out << pad(indent);
    const auto& payload = i.payload;
    if (const auto* s = std::get_if<chor::Comm>(&payload)) {
      out << s->from << "." << render_expr(s->expr, s->from) << " -> " << s->to << "." << s->var << ";"
          << key_comment(i, opts) << "\n";
    } else if (const auto* s = std::get_if<chor::CommInProgress>(&payload)) {
      out << s->from << " ~> " << s->to << "." << s->var << ";" << key_comment(i, opts) << "\n";
    } else if (const auto* s = std::get_if<chor::Select>(&payload)) {
      out << s->from << " -> " << s->to << " [" << s->label << "];" << key_comment(i, opts) << "\n";
    } else if (const auto* s = std::get_if<chor::SelectInProgress>(&payload)) {
      out << s->from << " ~> " << s->to << " [" << s->label << "];" << key_comment(i, opts) << "\n";
    } else if (const auto* s = std::get_if<chor::Compute>(&payload)) {
      out << s->proc << ".";
      if (s->var != "_") out << s->var << " = ";
      out << render_expr(s->expr, s->proc) << ";" << key_comment(i, opts) << "\n";
    } else if (const auto* s = std::get_if<chor::Cond>(&payload)) {
      out << "if " << s->proc << "." << render_expr(s->guard, s->proc) << " {" << key_comment(i, opts) << "\n"
          << render_chor(s->then_branch, opts, indent + 1) << pad(indent) << "} else {\n"
          << render_chor(s->else_branch, opts, indent + 1) << pad(indent) << "}\n";
    } else if (const auto* s = std::get_if<chor::Call>(&payload)) {
      out << s->procedure << "(" << join(s->roles);
      if (!s->args.empty()) out << "; " << render_call_args(s->args);
      out << ");" << key_comment(i, opts) << "\n";
    } else if (const auto* s = std::get_if<chor::CallInProgress>(&payload)) {
      out << s->procedure << "(" << join(s->roles);
      if (!s->args.empty()) out << "; " << render_call_args(s->args);
      out << ") pending [" << join(s->pending) << "] {" << key_comment(i, opts) << "\n"
          << render_chor(s->body, opts, indent + 1) << pad(indent) << "}\n";
    } else if (const auto* s = std::get_if<chor::Block>(&payload)) {
      out << "{\n" << render_chor(s->body, opts, indent + 1) << pad(indent) << "}\n";
    }
  }
  return out.str();
}

std::string render_program(const Program& p, const RenderOptions& opts) {
  std::ostringstream out;
  for (const auto& d : p.decls) {
    std::vector<std::string> params;
    for (const auto& v : d.params) params.push_back(v.to_string());
    out << "proc " << d.name << "(" << join(d.roles);
    if (!params.empty()) out << "; " << join(params);
    out << ") {\n" << render_chor(d.body, opts, 1) << "}\n\n";
  }
  out << "main {\n" << render_chor(p.main, opts, 1) << "}\n";
  return out.str();
}

std::string render_proc(const ProcessBehavior& p, int indent) {
  if (p.empty()) return pad(indent) + "0\n";
  std::ostringstream out;
  for (const auto& i : p) {
    out << pad(indent);
    const auto& payload = i.payload;
    if (const auto* s = std::get_if<local::Send>(&payload)) {
      out << "send " << s->to << " " << render_expr(s->expr) << " " << key_text(s->line, s->token) << ";\n";
    } else if (const auto* s = std::get_if<local::Recv>(&payload)) {
      out << "recv " << s->var << " " << key_text(s->line, s->token) << ";\n";
    } else if (const auto* s = std::get_if<local::Set>(&payload)) {
      out << s->var << " := " << render_expr(s->expr) << ";\n";
    } else if (const auto* s = std::get_if<local::Choose>(&payload)) {
      out << "choose " << s->to << " " << s->label << " " << key_text(s->line, s->token) << ";\n";
    } else if (const auto* s = std::get_if<local::Branch>(&payload)) {
      out << "branch {\n";
      for (const auto& o : s->options) {
        out << pad(indent + 1) << "(" << o.line << "," << to_string(o.token) << "," << o.label << ") => {\n"
            << render_proc(o.body, indent + 2) << pad(indent + 1) << "}\n";
      }
      out << pad(indent) << "}\n";
    } else if (const auto* s = std::get_if<local::If>(&payload)) {
      out << "if " << render_expr(s->guard) << " {\n"
          << render_proc(s->then_branch, indent + 1) << pad(indent) << "} else {\n"
          << render_proc(s->else_branch, indent + 1) << pad(indent) << "}\n";
    } else if (const auto* s = std::get_if<local::Call>(&payload)) {
      out << "call " << s->procedure << "(" << join(s->procs);
      if (!s->args.empty()) out << "; " << render_args(s->args, "");
      out << ") " << key_text(s->line, s->token) << ";\n";
    } else if (const auto* s = std::get_if<local::Block>(&payload)) {
      out << "{\n" << render_proc(s->body, indent + 1) << pad(indent) << "}\n";
    }
  }
  return out.str();
}

std::string render_proc_decl(const ProcProcedureDecl& d) {
  std::ostringstream out;
  out << "proc " << d.name << "(" << join(d.roles);
  if (!d.params.empty()) out << "; " << join(d.params);
  out << ") {\n" << render_proc(d.body, 1) << "}\n";
  return out.str();
}

}  // namespace o3
