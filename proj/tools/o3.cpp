// o3: command-line front end for the O3 toolkit.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "o3/chor_exec.hpp"
#include "o3/epp.hpp"
#include "o3/errors.hpp"
#include "o3/parser.hpp"
#include "o3/proc_exec.hpp"
#include "o3/scenario.hpp"
#include "o3/serialize.hpp"
#include "o3/verifier.hpp"
#include "o3/wellformed.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct RunConfig {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t depth = 200;
  std::size_t states = 200000;
  std::string schedule = "random";
  std::string transport = "unordered";
  std::string format = "text";
  std::int64_t items = 2;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void load_config(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw o3::ConfigError("cannot read config file '" + path + "'");
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw o3::ConfigError(path + ":" + std::to_string(n) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    try {
      if (key == "scenario") cfg.scenario = value;
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "depth") cfg.depth = std::stoull(value);
      else if (key == "states") cfg.states = std::stoull(value);
      else if (key == "schedule") cfg.schedule = value;
      else if (key == "transport") cfg.transport = value;
      else if (key == "format") cfg.format = value;
      else if (key == "items") cfg.items = std::stoll(value);
      else throw o3::ConfigError(path + ":" + std::to_string(n) + ": unknown key '" + key + "'");
    } catch (const std::logic_error&) {
      throw o3::ConfigError(path + ":" + std::to_string(n) + ": bad value for '" + key + "'");
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw o3::ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

o3::Program load_program(const std::string& path) {
  return o3::parse_program(read_file(path), fs::path(path).stem().string());
}

o3::StateMap initial_sigma(const o3::Program& prog, const RunConfig& cfg, const std::string& file) {
  o3::ScenarioOptions s;
  s.name = cfg.scenario.empty() ? o3::infer_scenario(file) : cfg.scenario;
  s.items = cfg.items;
  return o3::scenario_state(prog, s);
}

o3::Scheduler make_scheduler(const RunConfig& cfg, const std::vector<std::size_t>& choices) {
  o3::Scheduler s;
  s.seed = cfg.seed;
  if (cfg.schedule == "in-order") s.policy = o3::SchedulePolicy::InOrder;
  else if (cfg.schedule == "random") s.policy = o3::SchedulePolicy::Random;
  else if (cfg.schedule == "list") s.policy = o3::SchedulePolicy::List;
  else throw o3::ConfigError("unknown schedule '" + cfg.schedule + "'");
  s.choices = choices;
  return s;
}

o3::Transport parse_transport(const std::string& t) {
  if (t == "unordered") return o3::Transport::Unordered;
  if (t == "fifo") return o3::Transport::Fifo;
  throw o3::ConfigError("unknown transport '" + t + "'");
}

o3::KeyMode parse_keys(const std::string& k) {
  if (k == "on") return o3::KeyMode::On;
  if (k == "off") return o3::KeyMode::Off;
  if (k == "no-tokens") return o3::KeyMode::NoTokens;
  throw o3::ConfigError("unknown key mode '" + k + "'");
}

bool json_out(const RunConfig& cfg) { return cfg.format == "json"; }

void print_states(const o3::StateMap& sigma) {
  for (const auto& [p, s] : sigma) std::cout << "  " << p << ": " << o3::to_json(s).dump() << "\n";
}

void print_trace(const o3::Trace& t) {
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    std::cout << (i + 1) << "  " << s.rule << "  " << s.actor << "  " << s.key.to_string();
    if (s.message) std::cout << "  " << s.message->to_string();
    std::cout << "\n";
  }
}

// ---------------------------------------------------------------------------

int cmd_check(const std::string& file, const RunConfig& cfg) {
  const auto prog = load_program(file);
  o3::WfReport report = o3::check_program(prog);
  if (report.ok()) {
    try {
      const auto projected = o3::project_program(prog);
      report.append(o3::check_network(projected.network));
    } catch (const o3::ProjectionError& e) {
      report.add("EPP", e.key() ? e.key()->to_string() : e.role(), e.what());
    }
  }
  if (json_out(cfg)) {
    std::cout << o3::to_json(report).dump(2) << "\n";
  } else if (report.ok()) {
    std::cout << "well-formed\n";
  } else {
    for (const auto& v : report.violations) std::cout << v.rule << " at " << v.where << ": " << v.message << "\n";
  }
  return report.ok() ? kOk : kViolation;
}

int cmd_project(const std::string& file, const std::string& out_dir, const RunConfig& cfg) {
  const auto prog = load_program(file);
  const auto projected = o3::project_program(prog);
  if (out_dir.empty()) {
    if (json_out(cfg)) {
      json j = {{"schemaVersion", 1}, {"procedures", json::object()}, {"network", json::object()}};
      for (const auto& [name, d] : projected.decls) j["procedures"][name] = o3::render_proc_decl(d);
      for (const auto& [p, b] : projected.network) j["network"][p] = o3::render_proc(b);
      std::cout << j.dump(2) << "\n";
      return kOk;
    }
    for (const auto& [name, d] : projected.decls) std::cout << o3::render_proc_decl(d) << "\n";
    for (const auto& [p, b] : projected.network) std::cout << p << " [\n" << o3::render_proc(b, 1) << "]\n";
    return kOk;
  }
  fs::create_directories(out_dir);
  json manifest = {{"schemaVersion", 1}, {"program", prog.name}, {"roles", json::array()}, {"procedures", json::array()}};
  std::map<std::string, std::vector<std::string>> decls_of_role;
  for (const auto& decl : prog.decls)
    for (std::size_t j = 0; j < decl.roles.size(); ++j) {
      const std::string mangled = o3::mangle(decl.name, decl.roles[j]);
      const auto& pd = projected.decls.at(mangled);
      manifest["procedures"].push_back({{"name", mangled},
                                         {"procedure", decl.name},
                                         {"role", decl.roles[j]},
                                         {"rolePosition", j},
                                         {"otherRoles", pd.roles},
                                         {"params", pd.params}});
    }
  for (const auto& [p, b] : projected.network) {
    const std::string fname = prog.name + "_" + p + ".proc";
    std::ofstream out(fs::path(out_dir) / fname);
    for (const auto& [name, d] : projected.decls) out << o3::render_proc_decl(d) << "\n";
    out << p << " [\n" << o3::render_proc(b, 1) << "]\n";
    manifest["roles"].push_back({{"process", p}, {"file", fname}});
  }
  std::ofstream(fs::path(out_dir) / "manifest.json") << manifest.dump(2) << "\n";
  if (!json_out(cfg)) std::cout << "wrote " << projected.network.size() << " process files to " << out_dir << "\n";
  else std::cout << manifest.dump(2) << "\n";
  return kOk;
}

int cmd_run(const std::string& file, const RunConfig& cfg, std::size_t bound, const std::vector<std::size_t>& choices) {
  const auto prog = load_program(file);
  const auto c0 = o3::initial_configuration(prog, initial_sigma(prog, cfg, file));
  o3::ChorConfiguration final_cfg;
  const auto trace = o3::run(c0, prog, make_scheduler(cfg, choices), bound, &final_cfg);
  if (json_out(cfg)) {
    std::cout << o3::emit_trace_json(trace, {{"program", prog.name}, {"level", "choreography"}});
  } else {
    print_trace(trace);
    std::cout << (trace.terminated ? "terminated" : trace.stuck ? "stuck" : "bound reached") << " after "
              << trace.steps.size() << " steps\n";
    print_states(final_cfg.sigma);
  }
  return trace.stuck ? kViolation : kOk;
}

int cmd_simulate(const std::string& file, const RunConfig& cfg, std::size_t bound, const std::string& delay,
                 const std::string& keys, const std::vector<std::size_t>& choices) {
  const auto prog = load_program(file);
  const auto projected = o3::project_program(prog);
  o3::NetOptions opts;
  opts.transport = parse_transport(cfg.transport);
  opts.keys = parse_keys(keys);
  if (delay == "strict") opts.delay = o3::DelayMode::Strict;
  else if (delay == "loose") opts.delay = o3::DelayMode::Loose;
  else if (delay == "in-order") opts.delay = o3::DelayMode::InOrder;
  else throw o3::ConfigError("unknown delay mode '" + delay + "'");
  const auto n0 = o3::initial_net(projected, initial_sigma(prog, cfg, file));
  o3::NetConfiguration final_cfg;
  const auto trace = o3::run_net(n0, projected.decls, make_scheduler(cfg, choices), bound, opts, &final_cfg);
  if (json_out(cfg)) {
    std::cout << o3::emit_trace_json(trace, {{"program", prog.name}, {"level", "network"}, {"transport", cfg.transport}});
  } else {
    print_trace(trace);
    std::cout << (trace.terminated ? "terminated" : trace.stuck ? "stuck" : "bound reached") << " after "
              << trace.steps.size() << " steps\n";
    print_states(final_cfg.sigma);
  }
  return trace.stuck ? kViolation : kOk;
}

int cmd_verify(const std::string& file, const RunConfig& cfg, const std::string& checks, bool loose) {
  const auto prog = load_program(file);
  const auto sigma = initial_sigma(prog, cfg, file);
  o3::ExploreOptions opts;
  opts.depth = cfg.depth;
  opts.states = cfg.states;
  opts.preservation = opts.progress = opts.integrity = false;
  bool epp = false;
  std::stringstream ss(checks);
  for (std::string c; std::getline(ss, c, ',');) {
    c = trim(c);
    if (c == "preservation") opts.preservation = true;
    else if (c == "progress") opts.progress = true;
    else if (c == "integrity") opts.integrity = true;
    else if (c == "epp") epp = true;
    else throw o3::ConfigError("unknown check '" + c + "'");
  }
  json report = {{"schemaVersion", 1}, {"program", prog.name}, {"depth", cfg.depth}, {"states", cfg.states}};
  bool ok = true;
  if (opts.preservation || opts.progress || opts.integrity) {
    const auto r = o3::explore_chor(prog, sigma, opts);
    report["metatheory"] = o3::to_json(r);
    ok = ok && r.ok();
  }
  if (epp) {
    o3::NetOptions net;
    if (loose) net.delay = o3::DelayMode::Loose;
    const auto r = o3::check_epp_correspondence(prog, sigma, opts, net);
    report["epp"] = o3::to_json(r);
    ok = ok && r.ok();
  }
  report["ok"] = ok;
  if (json_out(cfg)) {
    std::cout << report.dump(2) << "\n";
  } else {
    for (const char* part : {"metatheory", "epp"}) {
      if (!report.contains(part)) continue;
      const auto& r = report[part];
      std::cout << part << ": " << r["states"] << " states, " << r["edges"] << " edges, depth " << r["depth"]
                << (r["truncated"].get<bool>() ? " (truncated)" : " (exhaustive)") << ", "
                << r["violations"].size() << " violations\n";
      for (const auto& v : r["violations"])
        std::cout << "  " << v["property"].get<std::string>() << ": " << v["detail"].get<std::string>() << "\n";
    }
    bool truncated = false;
    std::size_t reached = 0;
    for (const char* part : {"metatheory", "epp"})
      if (report.contains(part)) {
        truncated = truncated || report[part]["truncated"].get<bool>();
        reached = std::max(reached, report[part]["depth"].get<std::size_t>());
      }
    if (!ok)
      std::cout << "violations found\n";
    else if (truncated)
      std::cout << "no violations up to the state bound of " << cfg.states << " (depth " << reached << ")\n";
    else
      std::cout << "verified to depth " << cfg.depth << "\n";
  }
  return ok ? kOk : kViolation;
}

int cmd_civ(const std::string& file, const RunConfig& cfg, const std::string& keys) {
  const auto prog = load_program(file);
  const auto r = o3::find_civ(prog, initial_sigma(prog, cfg, file), parse_keys(keys), cfg.states);
  json j = o3::to_json(r);
  j["keys"] = keys;
  j["program"] = prog.name;
  if (json_out(cfg) || r.witness) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "no CIV in " << r.states << " states" << (r.truncated ? " (truncated)" : " (exhaustive)") << "\n";
  }
  return r.witness ? kViolation : kOk;
}

int cmd_bench(const std::string& file, const RunConfig& cfg, const std::string& delays_file, const std::string& policy) {
  const auto prog = load_program(file);
  const auto sigma = initial_sigma(prog, cfg, file);
  o3::LatencyOptions base;
  if (!delays_file.empty()) base = o3::latency_options_from_json(json::parse(read_file(delays_file)));
  base.transport = parse_transport(cfg.transport);
  json report = {{"schemaVersion", 1}, {"program", prog.name}, {"transport", cfg.transport}};
  for (const char* name : {"in-order", "out-of-order"}) {
    if (policy != "both" && policy != name) continue;
    o3::LatencyOptions o = base;
    o.policy = std::string(name) == "in-order" ? o3::DelayMode::InOrder : o3::DelayMode::Strict;
    report[name] = o3::to_json(o3::latency_sim(prog, sigma, o));
  }
  if (json_out(cfg)) {
    std::cout << report.dump(2) << "\n";
  } else {
    for (const char* name : {"in-order", "out-of-order"})
      if (report.contains(name)) std::cout << name << " makespan: " << report[name]["makespan"] << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"O3: fully out-of-order choreographies"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* env = std::getenv("O3_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::logic_error&) {
      std::cerr << "error: O3_SEED is not a number\n";
      return kUsage;
    }
  }

  std::string file, config_file, out_dir, checks = "preservation,progress,integrity,epp", keys = "on",
                                          delay = "strict", delays_file, policy = "both", choices_text;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> depth, states;
  std::optional<std::string> scenario, schedule, transport;
  std::optional<std::int64_t> items;
  std::size_t bound = 10000;
  bool as_json = false, loose = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("file", file, "choreography source (.chor)")->required();
    sub->add_option("--config", config_file, "flat key = value configuration file");
    sub->add_option("--scenario", scenario, "initial state preset");
    sub->add_option("--items", items, "streamit: items per producer");
    sub->add_flag("--json", as_json, "emit JSON");
  };

  auto* check = app.add_subcommand("check", "check well-formedness and projectability");
  common(check);
  auto* project = app.add_subcommand("project", "project to per-process programs");
  common(project);
  project->add_option("-o,--out", out_dir, "output directory");
  auto* run = app.add_subcommand("run", "execute the choreography semantics");
  common(run);
  auto* simulate = app.add_subcommand("simulate", "execute the projected network");
  common(simulate);
  for (auto* sub : {run, simulate}) {
    sub->add_option("--schedule", schedule, "in-order | random | list");
    sub->add_option("--seed", seed, "scheduler seed");
    sub->add_option("--bound", bound, "maximum number of steps");
    sub->add_option("--choices", choices_text, "comma-separated candidate indices for --schedule list");
  }
  simulate->add_option("--net", transport, "unordered | fifo");
  simulate->add_option("--delay", delay, "strict | loose | in-order");
  simulate->add_option("--keys", keys, "on | no-tokens | off");
  auto* verify = app.add_subcommand("verify", "bounded verification of the metatheory");
  common(verify);
  verify->add_option("--depth", depth, "depth bound");
  verify->add_option("--states", states, "state bound");
  verify->add_option("--checks", checks, "preservation,progress,integrity,epp");
  verify->add_flag("--loose-delay", loose, "network P-Delay may pass branches");
  auto* civ = app.add_subcommand("civ-demo", "search for communication integrity violations");
  common(civ);
  civ->add_option("--keys", keys, "on | no-tokens | off");
  civ->add_option("--states", states, "state bound");
  auto* bench = app.add_subcommand("bench", "compare in-order and out-of-order latency");
  common(bench);
  bench->add_option("--delays", delays_file, "JSON delays file");
  bench->add_option("--policy", policy, "in-order | out-of-order | both");
  bench->add_option("--net", transport, "unordered | fifo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (!config_file.empty()) load_config(config_file, cfg);
    if (scenario) cfg.scenario = *scenario;
    if (seed) cfg.seed = *seed;
    if (depth) cfg.depth = *depth;
    if (states) cfg.states = *states;
    if (schedule) cfg.schedule = *schedule;
    if (transport) cfg.transport = *transport;
    if (items) cfg.items = *items;
    if (as_json) cfg.format = "json";
    if (cfg.format != "text" && cfg.format != "json") throw o3::ConfigError("unknown format '" + cfg.format + "'");

    std::vector<std::size_t> choices;
    std::stringstream ss(choices_text);
    for (std::string c; std::getline(ss, c, ',');)
      if (!trim(c).empty()) choices.push_back(std::stoull(c));

    if (*check) return cmd_check(file, cfg);
    if (*project) return cmd_project(file, out_dir, cfg);
    if (*run) return cmd_run(file, cfg, bound, choices);
    if (*simulate) return cmd_simulate(file, cfg, bound, delay, keys, choices);
    if (*verify) return cmd_verify(file, cfg, checks, loose);
    if (*civ) return cmd_civ(file, cfg, keys);
    if (*bench) return cmd_bench(file, cfg, delays_file, policy);
  } catch (const o3::ParseError& e) {
    std::cerr << file << ":" << e.line() << ":" << e.column() << ": " << e.detail() << "\n";
    return kUsage;
  } catch (const o3::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const o3::ProjectionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kViolation;
  } catch (const o3::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
