#include "doctest.h"
#include "generator.hpp"
#include "o3/parser.hpp"
#include "support.hpp"

using namespace o3;
using namespace o3::testing;

TEST_SUITE("parser") {
  TEST_CASE("buyitem numbers keyed instructions in source order") {
    const Program prog = load_corpus("buyitem");
    REQUIRE(prog.decls.size() == 1);
    const auto& d = prog.decls[0];
    CHECK(d.name == "BuyItem");
    CHECK(d.roles == std::vector<std::string>{"s", "b"});
    CHECK(d.params == std::vector<LocatedVar>{{"b", "itemID"}});
    REQUIRE(d.body.size() == 3);
    CHECK(d.body[0].line == 1);
    CHECK(is_placeholder(d.body[0].token));
    CHECK(d.body[1].is<chor::Compute>());
    REQUIRE(prog.main.size() == 2);
    CHECK(prog.main[0].key() == IntegrityKey{4, Token{}});
    CHECK(prog.main[1].key() == IntegrityKey{5, Token{}});
    const auto& call = prog.main[1].as<chor::Call>();
    CHECK(call.roles == std::vector<std::string>{"seller", "buyer2"});
    REQUIRE(call.args.size() == 1);
    CHECK(call.args[0].value == Value::integer(543));
    CHECK(call.args[0].proc == "buyer2");
  }

  TEST_CASE("bare variables resolve to the acting process") {
    const Program prog = load_corpus("procx");
    const auto& e = prog.decls[0].body[2].as<chor::Comm>().expr;
    REQUIRE(e.is_app());
    CHECK(e.name == "transform");
    CHECK(e.args.at(0) == Expr::var("b", "x"));
  }

  TEST_CASE("conditionals and selections") {
    const Program prog = load_corpus("streamit");
    const auto& cond = prog.decls[0].body[2].as<chor::Cond>();
    CHECK(cond.proc == "p");
    CHECK(cond.guard.name == ">");
    REQUIRE(cond.then_branch.size() == 2);
    CHECK(cond.then_branch[0].as<chor::Select>().label == "MORE");
    CHECK(cond.then_branch[0].line == 4);
    CHECK(cond.else_branch[0].line == 6);
    CHECK(prog.labels == std::set<std::string>{"DONE", "MORE"});
  }

  TEST_CASE("parse errors carry positions") {
    try {
      parse_program("main {\n  p.x -> ;\n}\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() > 1);
    }
    CHECK_THROWS_AS(parse_program("main { p.x -> q.y }"), ParseError);
    CHECK_THROWS_AS(parse_program("proc A(a) { a.x -> a.y; }\nproc A(b) { b.x -> b.y; }\nmain { }"),
                    DuplicateProcedureName);
  }

  TEST_CASE("render then parse is the identity on the corpus") {
    for (const char* stem : {"buyitem", "streamit", "forwarding", "producers", "procx"}) {
      CAPTURE(stem);
      const Program prog = load_corpus(stem);
      CHECK(parse_program(render_program(prog), stem) == prog);
    }
  }

  TEST_CASE("render then parse is the identity on generated programs") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      CAPTURE(seed);
      const Program prog = generate_program(seed);
      CHECK(parse_program(render_program(prog), prog.name) == prog);
    }
  }

  TEST_CASE("rendering with keys annotates instructions") {
    const Program prog = load_corpus("buyitem");
    const std::string text = render_program(prog, RenderOptions{true});
    CHECK(text.find("(4,[])") != std::string::npos);
    CHECK(text.find("(1,t)") != std::string::npos);
  }
}
