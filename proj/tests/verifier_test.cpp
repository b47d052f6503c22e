#include "doctest.h"
#include "o3/verifier.hpp"
#include "support.hpp"

using namespace o3;
using namespace o3::testing;

TEST_SUITE("verifier") {
  TEST_CASE("small corpus programs explore clean") {
    for (const char* stem : {"buyitem", "forwarding", "producers", "procx"}) {
      CAPTURE(stem);
      const Program prog = load_corpus(stem);
      const auto r = explore_chor(prog, corpus_state(prog, stem));
      CHECK(r.ok());
      CHECK_FALSE(r.truncated);
      CHECK(r.reduced);
      const auto e = check_epp_correspondence(prog, corpus_state(prog, stem));
      CHECK(e.ok());
      CHECK_FALSE(e.truncated);
    }
  }

  TEST_CASE("reduction explores a subset and agrees on the verdict") {
    const Program prog = load_corpus("streamit");
    const auto sigma = corpus_state(prog, "streamit", 1);
    ExploreOptions full;
    full.reduce = false;
    const auto a = explore_chor(prog, sigma, full);
    const auto b = explore_chor(prog, sigma);
    CHECK(a.ok());
    CHECK(b.ok());
    CHECK_FALSE(a.truncated);
    CHECK(b.states <= a.states);
    CHECK(b.depth == a.depth);
  }

  TEST_CASE("loose delay on projected streamit still corresponds") {
    const Program prog = load_corpus("streamit");
    NetOptions loose;
    loose.delay = DelayMode::Loose;
    const auto r = check_epp_correspondence(prog, corpus_state(prog, "streamit", 1), {}, loose);
    CHECK(r.ok());
    CHECK_FALSE(r.truncated);
  }

  TEST_CASE("state cap truncates") {
    const Program prog = load_corpus("streamit");
    ExploreOptions small;
    small.states = 10;
    const auto r = explore_chor(prog, corpus_state(prog, "streamit"), small);
    CHECK(r.truncated);
  }

  TEST_CASE("keyless delivery on forwarding swaps text and key") {
    const Program prog = load_corpus("forwarding");
    const auto r = find_civ(prog, corpus_state(prog, "forwarding"), KeyMode::Off);
    REQUIRE(r.witness);
    CHECK(r.witness->process == "c");
    CHECK(r.witness->variable == "txt");
    CHECK(r.witness->bound.as_string().rfind("key-", 0) == 0);
    CHECK(r.witness->trace.size() <= 12);
  }

  TEST_CASE("line-only delivery on procx confuses the two calls") {
    const Program prog = load_corpus("procx");
    const auto r = find_civ(prog, corpus_state(prog, "procx"), KeyMode::NoTokens);
    REQUIRE(r.witness);
    CHECK(r.witness->receive_key.line == r.witness->message_key.line);
    CHECK(r.witness->receive_key.token != r.witness->message_key.token);
  }

  TEST_CASE("keyed delivery has no witness") {
    for (const char* stem : {"forwarding", "procx"}) {
      const Program prog = load_corpus(stem);
      const auto r = find_civ(prog, corpus_state(prog, stem), KeyMode::On);
      CHECK_FALSE(r.witness);
      CHECK_FALSE(r.truncated);
    }
  }

  TEST_CASE("latency on producers with and without a delayed first message") {
    const Program prog = load_corpus("producers");
    const auto sigma = corpus_state(prog, "producers");
    LatencyOptions in_order;
    in_order.policy = DelayMode::InOrder;
    LatencyOptions ooo;
    CHECK(latency_sim(prog, sigma, in_order).makespan == latency_sim(prog, sigma, ooo).makespan);
    in_order.overrides = ooo.overrides = {DelayOverride{"p1", 1, std::nullopt, 10}};
    const auto a = latency_sim(prog, sigma, in_order);
    const auto b = latency_sim(prog, sigma, ooo);
    CHECK(a.completed);
    CHECK(b.completed);
    CHECK(b.makespan < a.makespan);
  }

  TEST_CASE("latency options from json") {
    const auto o = latency_options_from_json(nlohmann::json::parse(
        R"({"compute": 2, "send": 0.5, "overrides": [{"sender": "p1", "nth": 1, "delay": 10}, {"key": [3, [7]], "delay": 4}]})"));
    CHECK(o.compute_cost == 2);
    CHECK(o.send_delay == 0.5);
    REQUIRE(o.overrides.size() == 2);
    CHECK(o.overrides[0].sender == "p1");
    CHECK(o.overrides[1].key == IntegrityKey{3, Token{{7}}});
  }

  TEST_CASE("exploration json carries the counts") {
    const Program prog = load_corpus("producers");
    const auto j = to_json(explore_chor(prog, corpus_state(prog, "producers")));
    CHECK(j.at("states").get<std::size_t>() > 0);
    CHECK(j.at("violations").empty());
    CHECK(j.at("reduction") == "partial-order");
  }
}
