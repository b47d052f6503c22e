#include "doctest.h"
#include "o3/errors.hpp"
#include "o3/eval.hpp"

using namespace o3;

namespace {

Expr call(const std::string& fn, std::vector<Expr> args = {}) { return Expr::app(fn, std::move(args)); }
Expr num(std::int64_t i) { return Expr::val(Value::integer(i)); }

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("arithmetic and comparison") {
    CHECK(eval({}, call("+", {num(2), num(3)})).first == Value::integer(5));
    CHECK(eval({}, call("*", {num(4), call("-", {num(3), num(1)})})).first == Value::integer(8));
    CHECK(eval_guard({}, call(">", {num(2), num(1)})).first);
    CHECK_FALSE(eval_guard({}, call("and", {Expr::val(Value::boolean(true)), Expr::val(Value::boolean(false))})).first);
    CHECK(eval({}, call("==", {num(1), num(1)})).first == Value::boolean(true));
  }

  TEST_CASE("itemsLeft counts down and stops at zero") {
    ProcState s;
    s.store["remaining"] = Value::integer(2);
    std::vector<std::int64_t> seen;
    for (int i = 0; i < 4; ++i) {
      auto [v, next] = eval(s, call("itemsLeft"));
      seen.push_back(v.as_int());
      s = next;
    }
    CHECK(seen == std::vector<std::int64_t>{2, 1, 0, 0});
  }

  TEST_CASE("produce and getKey draw from the counter") {
    ProcState s;
    auto [a, s1] = eval(s, call("produce"));
    auto [b, s2] = eval(s1, call("getKey"));
    CHECK(a == Value::integer(0));
    CHECK(b == Value::string("key-1"));
    CHECK(s2.counter == 2);
    CHECK(s.counter == 0);
  }

  TEST_CASE("loggers append and return unit") {
    auto [v, s] = eval({}, call("consume", {num(7)}));
    CHECK(v.is_unit());
    CHECK(s.logs["consumed"] == std::vector<Value>{Value::integer(7)});
  }

  TEST_CASE("store and load") {
    auto [u, s] = eval({}, call("store", {Expr::val(Value::string("k")), num(3)}));
    CHECK(u.is_unit());
    CHECK(eval(s, call("load", {Expr::val(Value::string("k"))})).first == Value::integer(3));
    CHECK(eval(s, call("load", {Expr::val(Value::string("other"))})).first.is_null());
  }

  TEST_CASE("sell decrements stock") {
    ProcState s;
    s.store["stock"] = Value::integer(1);
    auto [a, s1] = eval(s, call("sell", {num(123)}));
    auto [b, s2] = eval(s1, call("sell", {num(543)}));
    CHECK(a == Value::integer(123));
    CHECK(b.is_null());
    CHECK(s2.store["stock"] == Value::integer(0));
  }

  TEST_CASE("tagged functions on integers") {
    CHECK(eval({}, call("transform", {num(2)})).first == Value::integer(7));
    CHECK(eval({}, call("process", {num(1)})).first == Value::integer(9));
    CHECK(eval({}, call("compute", {num(3)})).first == Value::integer(7));
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(eval({}, call("nope")), UnknownBuiltin);
    CHECK_THROWS_AS(eval({}, call("+", {num(1)})), ArityError);
    CHECK_THROWS_AS(eval({}, call("+", {num(1), Expr::val(Value::boolean(true))})), TypeErrorAtRuntime);
    CHECK_THROWS_AS(eval({}, Expr::local_var("x")), OpenExpression);
    CHECK_THROWS_AS(eval_guard({}, num(1)), TypeErrorAtRuntime);
    BuiltinRegistry r = register_builtins();
    CHECK_THROWS_AS(r.add("produce", 0, [](ProcState&, const std::vector<Value>&) { return Value(); }),
                    DuplicateBuiltin);
  }
}
