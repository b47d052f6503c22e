#include <algorithm>

#include "doctest.h"
#include "generator.hpp"
#include "invariants.hpp"
#include "o3/chor_exec.hpp"
#include "o3/epp.hpp"
#include "o3/serialize.hpp"
#include "o3/verifier.hpp"
#include "o3/wellformed.hpp"
#include "support.hpp"

using namespace o3;
using namespace o3::testing;

namespace {

constexpr int kPrograms = 1000;

std::vector<std::string> roles_of(const Choreography& c) {
  const auto s = pn(c);
  return {s.begin(), s.end()};
}

// Call entry is one action whose rule name depends on who entered before.
std::string action_of(const std::string& rule) {
  return rule == "C-First" || rule == "C-Enter" || rule == "C-Last" ? "enter" : rule;
}

const TransitionCandidate* find_same(const std::vector<TransitionCandidate>& cands, const TransitionCandidate& t) {
  for (const auto& c : cands)
    if (action_of(c.rule) == action_of(t.rule) && c.actor == t.actor && c.key == t.key) return &c;
  return nullptr;
}

void require_clean(const PropertyReport& r) {
  INFO(r.first_failure);
  CHECK(r.cases > 0);
  CHECK(r.failures == 0);
}

}  // namespace

TEST_SUITE("generator") {
  TEST_CASE("generated programs are well-formed, projectable and within bounds") {
    for (int seed = 0; seed < kPrograms; ++seed) {
      CAPTURE(seed);
      const Program prog = generate_program(static_cast<std::uint64_t>(seed));
      CHECK(check_program(prog).ok());
      const auto pp = project_program(prog);
      CHECK(check_network(pp.network).ok());
      CHECK(pn(prog.main).size() <= 6);
      std::size_t instrs = stats(prog.main).size();
      for (const auto& d : prog.decls) instrs += stats(d.body).size();
      CHECK(instrs <= 12);
      CHECK(prog.decls.size() <= 2);
    }
  }
}

TEST_SUITE("receive-keys") {
  TEST_CASE("static choreographies: projections and their extensions expose every receive key") {
    require_clean(receive_keys_static(kPrograms));
  }

  TEST_CASE("reachable configurations: every receive key visible to q") {
    require_clean(receive_keys_reachable(kPrograms));
  }

  TEST_CASE("a pending role does not yet see the keys of the body it has not entered") {
    const Program prog = load_corpus("buyitem");
    auto cfg = initial_configuration(prog, corpus_state(prog, "buyitem"));
    for (const auto& c : enabled(cfg, prog))
      if (c.actor == "seller" && c.key == IntegrityKey{4, Token{}}) {
        cfg = apply(cfg, c, prog);
        break;
      }
    const auto proj = project_role(cfg.C, "buyer1", prog.decls);
    CHECK_FALSE(includes(keys_proc(proj), keys_q(cfg.C, "buyer1")));
    CHECK(includes(keys_proc(proj), visible_keys(cfg.C, "buyer1")));
  }
}

TEST_SUITE("subst-projection") {
  TEST_CASE("substitution commutes with projection") { require_clean(subst_projection(kPrograms)); }
}

TEST_SUITE("subst-branching") {
  TEST_CASE("substitution preserves the branching order") { require_clean(subst_branching(kPrograms)); }
}

TEST_SUITE("sequencing") {
  TEST_CASE("projection distributes over sequencing except at selections to q") {
    require_clean(projection_sequencing(kPrograms));
  }
}

TEST_SUITE("token-algebra") {
  TEST_CASE("next_token and the prefix order on random keys") { require_clean(token_algebra(10000)); }
}

TEST_SUITE("roundtrip") {
  TEST_CASE("render and parse agree on generated programs") {
    for (int seed = 0; seed < kPrograms; ++seed) {
      CAPTURE(seed);
      const Program prog = generate_program(static_cast<std::uint64_t>(seed));
      CHECK(parse_program(render_program(prog), prog.name) == prog);
    }
  }
}

TEST_SUITE("merge") {
  TEST_CASE("merge is commutative and idempotent on branch projections") {
    std::size_t cases = 0;
    for (int seed = 0; seed < kPrograms; ++seed) {
      const Program prog = generate_program(static_cast<std::uint64_t>(seed));
      for (const auto* i : stats(prog.main)) {
        const auto* cond = std::get_if<chor::Cond>(&i->payload);
        if (!cond) continue;
        for (const auto& q : roles_of(cond->then_branch)) {
          if (q == cond->proc) continue;
          const auto a = project_role(cond->then_branch, q, prog.decls);
          const auto b = project_role(cond->else_branch, q, prog.decls);
          CAPTURE(seed);
          CHECK(merge(a, b) == merge(b, a));
          CHECK(merge(a, a) == a);
          if (const auto m = merge(a, b)) {
            CHECK(branch_geq(*m, a));
            CHECK(branch_geq(*m, b));
          }
          ++cases;
        }
      }
    }
    CHECK(cases > 0);
  }
}

TEST_SUITE("por") {
  TEST_CASE("the chosen transition survives and commutes with every other") {
    std::size_t diamonds = 0;
    for (int seed = 0; seed < kPrograms; ++seed) {
      const Program prog = generate_program(static_cast<std::uint64_t>(seed));
      for (const auto& cfg : random_walk(prog, static_cast<std::uint64_t>(seed), 40)) {
        const auto cands = enabled(cfg, prog);
        const auto chosen = commuting_transition(cfg, cands);
        if (!chosen) continue;
        const auto& t = cands[*chosen];
        const auto after_t = apply(cfg, t, prog);
        for (std::size_t j = 0; j < cands.size(); ++j) {
          if (j == *chosen) continue;
          CAPTURE(seed);
          CAPTURE(t.rule);
          CAPTURE(cands[j].rule);
          const auto after_o = apply(cfg, cands[j], prog);
          const auto from_o = enabled(after_o, prog);
          const auto from_t = enabled(after_t, prog);
          const auto* t2 = find_same(from_o, t);
          REQUIRE(t2 != nullptr);
          const auto* o2 = find_same(from_t, cands[j]);
          REQUIRE(o2 != nullptr);
          CHECK(canonical(apply(after_o, *t2, prog)) == canonical(apply(after_t, *o2, prog)));
          ++diamonds;
        }
      }
    }
    CHECK(diamonds > 0);
  }
}

TEST_SUITE("metatheory") {
  TEST_CASE("generated programs explore without violations") {
    ExploreOptions opts;
    opts.states = 20000;
    for (int seed = 0; seed < 200; ++seed) {
      CAPTURE(seed);
      const Program prog = generate_program(static_cast<std::uint64_t>(seed));
      const auto r = explore_chor(prog, {}, opts);
      CHECK(r.ok());
      const auto e = check_epp_correspondence(prog, {}, opts);
      CHECK(e.ok());
    }
  }
}
