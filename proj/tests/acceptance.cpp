// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "goldens.hpp"
#include "invariants.hpp"
#include "o3/verifier.hpp"
#include "support.hpp"

using namespace o3;
using namespace o3::testing;

namespace {

const char* const kCorpus[] = {"buyitem", "streamit", "forwarding", "producers", "procx"};

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Workload {
  std::string stem;
  std::int64_t items;
};

std::vector<Workload> workloads() {
  std::vector<Workload> out;
  for (const char* stem : kCorpus) {
    if (std::string(stem) == "streamit") {
      for (std::int64_t items : {0, 1, 2}) out.push_back({stem, items});
    } else {
      out.push_back({stem, 0});
    }
  }
  return out;
}

std::string label(const Workload& w) {
  return w.stem == "streamit" ? w.stem + "[items=" + std::to_string(w.items) + "]" : w.stem;
}

ExploreOptions exhaustive() {
  ExploreOptions o;
  o.depth = 10000;
  o.states = 1000000;
  return o;
}

Outcome golden_projection() {
  const bool buy = normalized(project_program(load_corpus("buyitem"))) == golden_buyitem();
  const bool stream = normalized(project_program(load_corpus("streamit"))) == golden_streamit();
  return {buy && stream, std::string("buyitem ") + (buy ? "match" : "differs") + ", streamit " +
                             (stream ? "match" : "differs")};
}

Outcome explore_all(const std::function<ExplorationResult(const Program&, const StateMap&)>& check) {
  Outcome o{true, ""};
  for (const auto& w : workloads()) {
    const Program prog = load_corpus(w.stem);
    const auto r = check(prog, corpus_state(prog, w.stem, w.items));
    o.detail += label(w) + "=" + std::to_string(r.states);
    if (r.truncated) o.detail += "(truncated)";
    if (!r.ok()) o.detail += "(" + r.violations.front().property + ": " + r.violations.front().detail + ")";
    o.detail += " ";
    o.pass = o.pass && r.ok() && !r.truncated;
  }
  return o;
}

Outcome civ_demos() {
  Outcome o{true, ""};
  const Program fwd = load_corpus("forwarding");
  const auto off = find_civ(fwd, corpus_state(fwd, "forwarding"), KeyMode::Off);
  const bool fwd_ok = off.witness && off.witness->trace.size() <= 12 && off.witness->process == "c" &&
                      off.witness->variable == "txt" && off.witness->bound.is_string() &&
                      off.witness->bound.as_string().rfind("key-", 0) == 0;
  o.detail += "forwarding/off: " +
              (off.witness ? "c." + off.witness->variable + "=" + off.witness->bound.to_string() + " in " +
                                 std::to_string(off.witness->trace.size()) + " steps"
                           : std::string("no witness"));

  const Program px = load_corpus("procx");
  const auto nt = find_civ(px, corpus_state(px, "procx"), KeyMode::NoTokens);
  const bool px_ok = nt.witness && nt.witness->receive_key.line == nt.witness->message_key.line &&
                     nt.witness->receive_key.token != nt.witness->message_key.token;
  o.detail += "; procx/no-tokens: " +
              (nt.witness ? "recv " + nt.witness->receive_key.to_string() + " got " + nt.witness->message_key.to_string()
                          : std::string("no witness"));

  bool none = true;
  for (const Program* p : {&fwd, &px}) {
    const auto on = find_civ(*p, corpus_state(*p, p->name), KeyMode::On, 1000000);
    none = none && !on.witness && !on.truncated;
    o.detail += "; " + p->name + "/on: " + (on.witness ? "WITNESS" : "none") + " in " + std::to_string(on.states) +
                " states" + (on.truncated ? " (truncated)" : "");
  }
  o.pass = fwd_ok && px_ok && none;
  return o;
}

Outcome projection_properties() {
  Outcome o{true, ""};
  const std::pair<const char*, PropertyReport> reports[] = {
      {"receive-keys-static", receive_keys_static(1000)},
      {"receive-keys-reachable", receive_keys_reachable(1000)},
      {"subst-projection", subst_projection(1000)},
      {"subst-branching", subst_branching(1000)},
      {"sequencing", projection_sequencing(1000)},
  };
  for (const auto& [name, r] : reports) {
    o.detail += std::string(name) + " " + std::to_string(r.cases) + " cases/" + std::to_string(r.failures) + " cex ";
    if (!r.ok()) o.detail += "[" + r.first_failure + "] ";
    o.pass = o.pass && r.ok();
  }
  return o;
}

Outcome token_suite() {
  const auto r = token_algebra(10000);
  return {r.ok(), std::to_string(r.cases) + " samples, " + std::to_string(r.failures) + " failures" +
                      (r.ok() ? "" : " [" + r.first_failure + "]")};
}

Outcome scheduling_benefit() {
  const Program prog = load_corpus("producers");
  const auto sigma = corpus_state(prog, "producers");
  auto makespan = [&](DelayMode policy, double send, bool delayed) {
    LatencyOptions o;
    o.policy = policy;
    o.send_delay = send;
    if (delayed) o.overrides.push_back(DelayOverride{"p1", 1, std::nullopt, 10});
    return latency_sim(prog, sigma, o).makespan;
  };
  const double in_d = makespan(DelayMode::InOrder, 1, true);
  const double ooo_d = makespan(DelayMode::Strict, 1, true);
  const double in_0 = makespan(DelayMode::InOrder, 0, false);
  const double ooo_0 = makespan(DelayMode::Strict, 0, false);
  char buf[160];
  std::snprintf(buf, sizeof buf, "delayed: out-of-order %.1f < in-order %.1f; zero delays: %.1f = %.1f", ooo_d, in_d,
                ooo_0, in_0);
  return {ooo_d < in_d && ooo_0 == in_0, buf};
}

Outcome head_of_line() {
  const Program prog = load_corpus("streamit");
  const auto sigma = corpus_state(prog, "streamit", 2);
  auto first_consume = [&](Transport t) {
    LatencyOptions o;
    o.transport = t;
    o.overrides.push_back(DelayOverride{"p1", 1, std::nullopt, 10});
    return latency_sim(prog, sigma, o).first("consume");
  };
  const auto keyed = first_consume(Transport::Unordered);
  const auto fifo = first_consume(Transport::Fifo);
  if (!keyed || !fifo) return {false, "no consume event"};
  char buf[120];
  std::snprintf(buf, sizeof buf, "first consume: unordered %.1f < fifo %.1f", *keyed, *fifo);
  return {*keyed < *fifo, buf};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "golden projection", 1, golden_projection},
      {2, "metatheory exploration", 120,
       [] { return explore_all([](const Program& p, const StateMap& s) { return explore_chor(p, s, exhaustive()); }); }},
      {3, "EPP correspondence", 300,
       [] {
         return explore_all(
             [](const Program& p, const StateMap& s) { return check_epp_correspondence(p, s, exhaustive()); });
       }},
      {4, "CIV demonstrations", 180, civ_demos},
      {5, "projection properties", 120, projection_properties},
      {6, "token algebra", 5, token_suite},
      {7, "scheduling benefit", 5, scheduling_benefit},
      {8, "non-FIFO head-of-line", 5, head_of_line},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs <= c.budget_s;
    const bool pass = o.pass && in_budget;
    failed += !pass;
    std::printf("%s %d %s (%.2fs%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                in_budget ? "" : ", over budget", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
