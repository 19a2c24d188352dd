// Command-line front end.
//
// Exit codes: 0 positive verdict, 1 negative verdict, 2 usage or input
// error, 3 inconclusive (fuel ran out, or a preciseness check disagreed
// with the subtyping verdict).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mpst/characteristic.hpp"
#include "mpst/global.hpp"
#include "mpst/runtime.hpp"
#include "mpst/subtype.hpp"
#include "mpst/text.hpp"
#include "mpst/typing.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mpst;

namespace {

constexpr int kPositive = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kInconclusive = 3;

struct Options {
  std::size_t fuel = 10000;
  bool trace = false;
  bool json = false;
};

struct Report {
  std::string command;
  std::string verdict;
  json witness;
  std::string text;  // human-readable form
  int code = kPositive;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Falls back to $MPST_FIXTURES/<path> and $MPST_FIXTURES/<file name>.
fs::path resolve(const std::string& arg) {
  fs::path p(arg);
  if (fs::exists(p)) return p;
  if (const char* dir = std::getenv("MPST_FIXTURES")) {
    for (const fs::path& c : {fs::path(dir) / p, fs::path(dir) / p.filename()}) {
      if (fs::exists(c)) return c;
    }
  }
  throw InputError("cannot open '" + arg + "'");
}

Term load(Category cat, const std::string& arg) {
  fs::path path = resolve(arg);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse(cat, buf.str());
  } catch (const ParseError& e) {
    throw InputError(path.string() + ":" + e.what() + " (" + to_string(e.kind()) + ")");
  }
}

TypePtr load_type(const std::string& arg) { return std::get<TypePtr>(load(Category::SessionType, arg)); }
GlobalPtr load_global(const std::string& arg) { return std::get<GlobalPtr>(load(Category::GlobalType, arg)); }
ProcPtr load_process(const std::string& arg) { return std::get<ProcPtr>(load(Category::Process, arg)); }
Session load_session(const std::string& arg) { return std::get<Session>(load(Category::Session, arg)); }

json derivation_json(const NsubDerivation& d) {
  json j{{"rule", d.rule}, {"left", print(d.left)}, {"right", print(d.right)}};
  if (!d.reason.empty()) j["reason"] = d.reason;
  json kids = json::array();
  for (const auto& c : d.children) kids.push_back(derivation_json(c));
  j["children"] = kids;
  return j;
}

std::string type_error_text(const TypeError& e) {
  return std::string(e.what()) + " (" + std::string(to_string(e.kind())) + ")\n";
}

json type_error_json(const TypeError& e) {
  return {{"kind", to_string(e.kind())}, {"rule", e.rule()}, {"path", e.path()}, {"message", e.detail()}};
}

json trace_json(const std::vector<Step>& trace) {
  json steps = json::array();
  for (const auto& s : trace) steps.push_back(to_string(s));
  return steps;
}

std::string trace_text(const std::vector<Step>& trace) {
  std::string out;
  for (const auto& s : trace) out += to_string(s) + "\n";
  return out;
}

Report subtype_cmd(const std::string& a, const std::string& b) {
  TypePtr t = load_type(a);
  TypePtr tp = load_type(b);
  Decision d = decide(t, tp);
  if (d.leq) return {"subtype", "leq", nullptr, print(t) + "  \xE2\x89\xA4  " + print(tp) + "\n", kPositive};
  return {"subtype", "nleq", derivation_json(*d.witness), print(*d.witness), kNegative};
}

Report project_cmd(const std::string& file, const std::string& r) {
  GlobalPtr g = load_global(file);
  try {
    TypePtr t = project(g, r);
    return {"project", "defined", print(t), print(t) + "\n", kPositive};
  } catch (const ProjectionError& e) {
    json w{{"kind", to_string(e.kind())}, {"participant", e.participant()}, {"path", e.path()}, {"message", e.what()}};
    return {"project", "undefined", w, std::string(e.what()) + "\n", kNegative};
  }
}

Report check_proc_cmd(const std::string& pf, const std::string& tf) {
  ProcPtr p = load_process(pf);
  TypePtr t = load_type(tf);
  try {
    check_process(Env{}, p, t);
    return {"check-proc", "ok", nullptr, "ok\n", kPositive};
  } catch (const TypeError& e) {
    return {"check-proc", "ill-typed", type_error_json(e), type_error_text(e), kNegative};
  }
}

Report check_session_cmd(const std::string& mf, const std::string& gf) {
  Session m = load_session(mf);
  GlobalPtr g = load_global(gf);
  try {
    check_session(m, g);
    return {"check-session", "ok", nullptr, "ok\n", kPositive};
  } catch (const TypeError& e) {
    return {"check-session", "ill-typed", type_error_json(e), type_error_text(e), kNegative};
  }
}

Report run_cmd(const std::string& mf, const Options& opt) {
  RunResult r = run(SessionState::from(load_session(mf)), opt.fuel);
  json w{{"trace", trace_json(r.trace)}, {"final", print(r.final_state)}, {"steps", r.trace.size()}};
  std::string text = opt.trace ? trace_text(r.trace) : "";
  text += std::string(to_string(r.outcome)) + " after " + std::to_string(r.trace.size()) + " steps\n";
  text += print(r.final_state) + "\n";
  int code = r.outcome == RunResult::Outcome::Terminated ? kPositive
             : r.outcome == RunResult::Outcome::Stuck    ? kNegative
                                                         : kInconclusive;
  return {"run", to_string(r.outcome), w, text, code};
}

int stuck_code(StuckReport::Verdict v) {
  switch (v) {
    case StuckReport::Verdict::Terminated:
    case StuckReport::Verdict::NoStuckWithinFuel: return kPositive;
    case StuckReport::Verdict::StuckFound: return kNegative;
    case StuckReport::Verdict::Diverged: return kInconclusive;
  }
  return kInconclusive;
}

json stuck_json(const StuckReport& r) {
  json w{{"expanded", r.expanded}, {"discovered", r.discovered}};
  if (r.verdict == StuckReport::Verdict::StuckFound) {
    w["trace"] = trace_json(r.trace);
    w["stuck_state"] = print(r.states.back());
  }
  return w;
}

std::string stuck_text(const StuckReport& r) {
  std::string out = std::string(to_string(r.verdict)) + " (" + std::to_string(r.expanded) + " states expanded, " +
                    std::to_string(r.discovered) + " discovered)\n";
  if (r.verdict == StuckReport::Verdict::StuckFound) {
    out += trace_text(r.trace);
    out += "stuck: " + print(r.states.back()) + "\n";
  }
  return out;
}

Report stuck_cmd(const std::string& mf, const Options& opt) {
  StuckReport r = stuck_search(SessionState::from(load_session(mf)), opt.fuel);
  return {"stuck", to_string(r.verdict), stuck_json(r), stuck_text(r), stuck_code(r.verdict)};
}

Report char_global_cmd(const std::string& tf, const std::string& p) {
  GlobalPtr g = char_global(load_type(tf), p);
  return {"char-global", "ok", print(g), print(g) + "\n", kPositive};
}

Report char_proc_cmd(const std::string& tf) {
  ProcPtr p = char_proc(load_type(tf));
  return {"char-proc", "ok", print(p), print(p) + "\n", kPositive};
}

Report precise_cmd(const std::string& a, const std::string& b, const Options& opt) {
  TypePtr t = load_type(a);
  TypePtr tp = load_type(b);
  PrecisenessReport r = preciseness_check(t, tp, opt.fuel);
  json w{{"subtype", r.decision.leq ? "leq" : "nleq"},
         {"probe", r.probe},
         {"session", print(r.session)},
         {"search", stuck_json(r.search)},
         {"search_verdict", to_string(r.search.verdict)}};
  std::string text = std::string(r.decision.leq ? "leq" : "nleq") + "\n";
  if (r.decision.witness) {
    w["derivation"] = derivation_json(*r.decision.witness);
    text += print(*r.decision.witness);
  } else {
    w["context_typed"] = r.context_typed;
    text += std::string("context well typed with P(T'): ") + (r.context_typed ? "yes" : "no") + "\n";
  }
  text += "session: " + print(r.session) + "\n" + stuck_text(r.search);
  text += std::string(to_string(r.outcome)) + "\n";
  int code = r.outcome != PrecisenessReport::Outcome::Confirmed ? kInconclusive
             : r.decision.leq                                   ? kPositive
                                                                : kNegative;
  return {"precise", r.decision.leq ? "leq" : "nleq", w, text, code};
}

Report parse_cmd(const std::string& category, const std::string& file) {
  auto cat = category_from_string(category);
  if (!cat) throw InputError("unknown category '" + category + "'");
  std::string printed = print(load(*cat, file));
  return {"parse", "ok", printed, printed + "\n", kPositive};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronous multiparty session types: subtyping, projection, typing and stuck-state search"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--fuel", opt.fuel, "States (stuck, precise) or steps (run) to explore")->check(CLI::PositiveNumber);
  app.add_flag("--trace", opt.trace, "Print every reduction step");
  app.add_flag("--json", opt.json, "Print a JSON report");

  std::vector<std::string> args;
  std::function<Report()> action;
  auto command = [&](const char* name, const char* help, std::vector<const char*> params, auto body) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("args", args, "")->expected(static_cast<int>(params.size()))->required();
    std::string usage;
    for (const char* p : params) usage += std::string(" <") + p + ">";
    sub->usage(std::string("mpst ") + name + usage + " [--fuel N] [--trace] [--json]");
    sub->callback([&, body] { action = [&, body] { return body(args); }; });
  };
  using A = const std::vector<std::string>&;
  command("parse", "Parse and print a term", {"category", "file"}, [](A a) { return parse_cmd(a[0], a[1]); });
  command("subtype", "Decide T <= T'", {"T", "T'"}, [](A a) { return subtype_cmd(a[0], a[1]); });
  command("project", "Project a global type", {"G", "participant"}, [](A a) { return project_cmd(a[0], a[1]); });
  command("check-proc", "Check a process against a session type", {"P", "T"},
          [](A a) { return check_proc_cmd(a[0], a[1]); });
  command("check-session", "Check a session against a global type", {"M", "G"},
          [](A a) { return check_session_cmd(a[0], a[1]); });
  command("run", "Execute a session, first reduct first", {"M"}, [&](A a) { return run_cmd(a[0], opt); });
  command("stuck", "Search for a reachable stuck state", {"M"}, [&](A a) { return stuck_cmd(a[0], opt); });
  command("char-global", "Characteristic global type", {"T", "participant"},
          [](A a) { return char_global_cmd(a[0], a[1]); });
  command("char-proc", "Characteristic process", {"T"}, [](A a) { return char_proc_cmd(a[0]); });
  command("precise", "Check preciseness on one pair", {"T", "T'"},
          [&](A a) { return precise_cmd(a[0], a[1], opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  auto start = std::chrono::steady_clock::now();
  Report report;
  try {
    report = action();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParticipantClash& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInconclusive;
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  if (opt.json) {
    json out{{"command", report.command},
             {"verdict", report.verdict},
             {"witness", report.witness},
             {"exit_code", report.code},
             {"timings", {{"total_ms", ms}}}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << report.text;
  }
  return report.code;
}
