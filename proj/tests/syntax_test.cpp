#include "doctest.h"
#include "o3/epp.hpp"
#include "o3/syntax.hpp"
#include "support.hpp"

using namespace o3;
using namespace o3::testing;

namespace {

ChorInstr comm(int line, const std::string& p, Expr e, const std::string& q, const std::string& x) {
  return ChorInstr(line, Token{}, chor::Comm{p, std::move(e), q, x});
}

}  // namespace

TEST_SUITE("syntax") {
  TEST_CASE("pn and fv of expressions") {
    const Expr e = Expr::app("+", {Expr::var("p", "x"), Expr::val(Value::integer(1), "p")});
    CHECK(pn(e) == std::set<std::string>{"p"});
    CHECK(fv(e) == std::set<LocatedVar>{{"p", "x"}});
    CHECK_FALSE(closed(e));
    CHECK(closed(Expr::app("produce", {})));
  }

  TEST_CASE("fv removes variables bound by receives and assignments") {
    Choreography c;
    c.push_back(comm(1, "p", Expr::var("p", "a"), "q", "x"));
    c.push_back(ChorInstr(2, Token{}, chor::Compute{"y", "q", Expr::app("transform", {Expr::var("q", "x")})}));
    c.push_back(comm(3, "q", Expr::var("q", "y"), "r", "z"));
    CHECK(fv(c) == std::set<LocatedVar>{{"p", "a"}});
    CHECK(pn(c) == std::set<std::string>{"p", "q", "r"});
  }

  TEST_CASE("stats and keys recurse into blocks and branches") {
    const Program prog = load_corpus("streamit");
    const auto& body = prog.decls.at(0).body;
    CHECK(stats(body).size() == 6);
    const auto keys = keys_chor(prog.main);
    REQUIRE(keys.size() == 2);
    CHECK(keys[0].line == 7);
    CHECK(keys[1].line == 8);
  }

  TEST_CASE("concat_block drops empty blocks") {
    Choreography cont{comm(2, "p", Expr::val(Value::integer(0), "p"), "q", "y")};
    CHECK(concat_block({}, cont) == cont);
    Choreography body{comm(1, "p", Expr::val(Value::integer(1), "p"), "q", "x")};
    const auto joined = concat_block(body, cont);
    REQUIRE(joined.size() == 2);
    CHECK(joined[0].is_block());
    CHECK(joined[1] == cont[0]);
  }

  TEST_CASE("normalize flattens tail blocks and removes empty ones") {
    Choreography inner{comm(1, "p", Expr::val(Value::integer(1), "p"), "q", "x")};
    Choreography c{ChorInstr::block({}), ChorInstr::block(inner)};
    CHECK(normalize(c) == inner);
    CHECK(is_terminated(Choreography{ChorInstr::block({ChorInstr::block({})})}));
    CHECK_FALSE(is_terminated(c));
  }

  TEST_CASE("substitution replaces located variables only") {
    Choreography c{comm(1, "p", Expr::var("p", "x"), "q", "y"),
                   ChorInstr(2, Token{}, chor::Compute{"z", "q", Expr::var("q", "x")})};
    const auto s = substitute(c, {"p", "x"}, Value::integer(9));
    CHECK(s[0].as<chor::Comm>().expr.is_val());
    CHECK(s[0].as<chor::Comm>().expr.value == Value::integer(9));
    CHECK(s[1].as<chor::Compute>().expr.is_var());
  }

  TEST_CASE("substitution stops at a rebinding receive") {
    Choreography c{comm(1, "p", Expr::val(Value::integer(1), "p"), "q", "x"),
                   ChorInstr(2, Token{}, chor::Compute{"z", "q", Expr::var("q", "x")})};
    const auto s = substitute(c, {"q", "x"}, Value::integer(9));
    CHECK(s[1].as<chor::Compute>().expr.is_var());
  }

  TEST_CASE("instantiating a procedure renames roles and fills the token") {
    const Program prog = load_corpus("buyitem");
    const auto body = instantiate_procedure(prog.decls.at(0), {"seller", "buyer1"},
                                            {Expr::val(Value::integer(123), "buyer1")}, Token{{4}});
    REQUIRE(body.size() == 3);
    const auto& first = body[0].as<chor::Comm>();
    CHECK(first.from == "buyer1");
    CHECK(first.to == "seller");
    CHECK(first.expr.value == Value::integer(123));
    CHECK(body[2].key() == IntegrityKey{3, Token{{4}}});
    CHECK_FALSE(contains_runtime_terms(body));
  }

  TEST_CASE("rename_roles is simultaneous") {
    Choreography c{comm(1, "a", Expr::var("a", "x"), "b", "y")};
    const auto r = rename_roles(c, {{"a", "b"}, {"b", "a"}});
    CHECK(r[0].as<chor::Comm>().from == "b");
    CHECK(r[0].as<chor::Comm>().to == "a");
    CHECK(r[0].as<chor::Comm>().expr.proc == "b");
  }
}
