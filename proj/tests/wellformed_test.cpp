#include "doctest.h"
#include "generator.hpp"
#include "o3/chor_exec.hpp"
#include "o3/wellformed.hpp"
#include "support.hpp"

using namespace o3;
using namespace o3::testing;

namespace {

ChorConfiguration advance(const Program& prog, ChorConfiguration cfg, const std::string& rule) {
  for (const auto& c : enabled(cfg, prog))
    if (c.rule == rule) return apply(cfg, c, prog);
  FAIL("no " << rule << " transition");
  return cfg;
}

}  // namespace

TEST_SUITE("wellformed") {
  TEST_CASE("corpus programs are well-formed") {
    for (const char* stem : {"buyitem", "streamit", "forwarding", "producers", "procx"}) {
      CAPTURE(stem);
      const auto r = check_program(load_corpus(stem));
      CHECK(r.ok());
    }
  }

  TEST_CASE("generated programs are well-formed") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      CAPTURE(seed);
      CHECK(check_program(generate_program(seed)).ok());
    }
  }

  TEST_CASE("a receive in progress without its message") {
    const Program prog = load_corpus("producers");
    auto cfg = advance(prog, initial_configuration(prog), "C-Send");
    REQUIRE(check_config(cfg, prog).ok());
    cfg.K["q"].clear();
    CHECK(check_config(cfg, prog).cites("C-WF-Recv"));
  }

  TEST_CASE("a pending send whose message is already delivered") {
    const Program prog = load_corpus("producers");
    auto cfg = initial_configuration(prog);
    cfg.K["q"].push_back(Message{1, Token{}, Value::integer(0), "p1"});
    CHECK(check_config(cfg, prog).cites("C-WF-Send"));
  }

  TEST_CASE("duplicate integrity keys") {
    const Program prog = load_corpus("producers");
    auto cfg = initial_configuration(prog);
    cfg.C.push_back(cfg.C.front());
    CHECK(check_config(cfg, prog).cites("C-WF"));
  }

  TEST_CASE("a pending role that is not a participant") {
    const Program prog = load_corpus("buyitem");
    auto cfg = advance(prog, initial_configuration(prog), "C-First");
    REQUIRE(check_config(cfg, prog).ok());
    bool patched = false;
    for (auto& i : cfg.C)
      if (i.is<chor::CallInProgress>()) {
        i.as<chor::CallInProgress>().pending.push_back("stranger");
        patched = true;
        break;
      }
    REQUIRE(patched);
    CHECK(check_config(cfg, prog).cites("C-WF-Calling"));
  }

  TEST_CASE("declaration checks") {
    const Program prog = parse_program("proc A(a, b) { a.x -> b.y; }\nmain { A(p, q); }\n");
    const auto r = check_decl(prog.decls.at(0), prog);
    CHECK(r.cites("C-WF-Def"));
    const Program ok = parse_program("proc A(a, b; a.x) { a.x -> b.y; }\nmain { A(p, q; 1); }\n");
    CHECK(check_program(ok).ok());
  }

  TEST_CASE("network key distinctness") {
    Network n;
    n["p"] = {local::Send{"q", 1, Token{}, Expr::val(Value::integer(1))},
              local::Send{"q", 1, Token{}, Expr::val(Value::integer(2))}};
    CHECK_FALSE(check_network(n).ok());
    n["p"].pop_back();
    CHECK(check_network(n).ok());
  }
}
