#include <algorithm>

#include "doctest.h"
#include "o3/epp.hpp"
#include "o3/proc_exec.hpp"
#include "support.hpp"

using namespace o3;
using namespace o3::testing;

namespace {

NetConfiguration branch_then_send() {
  NetConfiguration cfg;
  local::Branch b;
  b.options.push_back(local::BranchOption{1, Token{}, "L", {}});
  cfg.N["q"] = {b, local::Send{"p", 2, Token{}, Expr::val(Value::integer(1))}};
  cfg.N["p"] = {};
  cfg.sigma = {{"p", {}}, {"q", {}}};
  cfg.K = {{"p", {}}, {"q", {}}};
  return cfg;
}

bool offers_send(const std::vector<TransitionCandidate>& cands) {
  return std::any_of(cands.begin(), cands.end(), [](const auto& c) { return c.rule == "P-Send"; });
}

}  // namespace

TEST_SUITE("proc_exec") {
  TEST_CASE("strict delay never passes a branch, loose delay may") {
    const auto cfg = branch_then_send();
    CHECK_FALSE(offers_send(enabled_at(cfg, "q", {}, NetOptions{DelayMode::Strict})));
    CHECK(offers_send(enabled_at(cfg, "q", {}, NetOptions{DelayMode::Loose})));
    CHECK_FALSE(offers_send(enabled_at(cfg, "q", {}, NetOptions{DelayMode::InOrder})));
  }

  TEST_CASE("a branch consumes its label") {
    auto cfg = branch_then_send();
    cfg.K["q"].push_back(Message{1, Token{}, Value::label("L"), "p"});
    const auto cands = enabled_at(cfg, "q", {});
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].rule == "P-OnSelect");
    const auto next = apply_net(cfg, cands[0], {});
    CHECK(next.K.at("q").empty());
    CHECK(next.N.at("q").size() == 1);
  }

  TEST_CASE("projected corpus networks terminate under every delay mode") {
    for (const char* stem : {"buyitem", "streamit", "forwarding", "producers", "procx"}) {
      const Program prog = load_corpus(stem);
      const auto pp = project_program(prog);
      for (auto mode : {DelayMode::Strict, DelayMode::Loose, DelayMode::InOrder}) {
        CAPTURE(stem);
        NetConfiguration end;
        const Trace tr = run_net(initial_net(pp, corpus_state(prog, stem)), pp.decls,
                                 Scheduler{SchedulePolicy::Random, 3}, 5000, NetOptions{mode}, &end);
        CHECK(tr.terminated);
        CHECK(is_terminated(end.N));
      }
    }
  }

  TEST_CASE("keyed receive picks the message with its own key") {
    NetConfiguration cfg;
    cfg.N["q"] = {local::Recv{"x", 2, Token{}, "p"}};
    cfg.sigma = {{"q", {}}};
    cfg.K["q"] = {Message{1, Token{}, Value::integer(10), "p"}, Message{2, Token{}, Value::integer(20), "p"}};
    const auto cands = enabled_at(cfg, "q", {});
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].message == 1u);
    const auto off = enabled_at(cfg, "q", {}, NetOptions{DelayMode::Strict, Transport::Unordered, KeyMode::Off});
    CHECK(off.size() == 2);
    const auto fifo = enabled_at(cfg, "q", {}, NetOptions{DelayMode::Strict, Transport::Fifo, KeyMode::Off});
    REQUIRE(fifo.size() == 1);
    CHECK(fifo[0].message == 0u);
  }

  TEST_CASE("state hashes ignore message arrival order") {
    NetConfiguration a;
    a.N["q"] = {};
    a.K["q"] = {Message{1, Token{}, Value::integer(1), "p"}, Message{2, Token{}, Value::integer(2), "p"}};
    NetConfiguration b = a;
    std::swap(b.K["q"][0], b.K["q"][1]);
    CHECK(state_hash(a) == state_hash(b));
    CHECK(canonical(a) == canonical(b));
  }
}
