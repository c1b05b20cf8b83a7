#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "polychor/correspondence.hpp"
#include "polychor/eval.hpp"
#include "polychor/projection.hpp"
#include "polychor/syntax.hpp"

#ifndef POLYCHOR_VERSION
#define POLYCHOR_VERSION "0.0.0"
#endif
#ifndef POLYCHOR_CORPUS_DIR
#define POLYCHOR_CORPUS_DIR "corpus"
#endif

using namespace polychor;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kLanguage = 1, kViolation = 2, kUsage = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A parse, type or projection error already rendered with its position.
struct LanguageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  bool json_out = false;
  std::vector<std::string> inputs;
  std::string role;
  bool all_roles = false;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  std::string policy = "random";
  std::int64_t fuel = 100000;
  int depth = 8;
  int bound = -1;
  bool trace = false;
  std::string trace_json;
  std::string theorem = "completeness";
  std::string report_json;
  bool serial = false;
  bool up_to_bottom_apps = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

// Source position of a node, if the node came straight from the parser.
std::string where(const SourceUnit* u, const std::string& file, const Expr* node) {
  if (u && node) {
    auto it = u->spans.find(node);
    if (it != u->spans.end()) return file + ":" + std::to_string(it->second.line) + ":" + std::to_string(it->second.col);
  }
  return file;
}

struct Loaded {
  std::string file;
  SourceUnit unit;
  std::unique_ptr<CheckedUnit> checked;
};

// Runs f, attaching source positions from l to type and projection errors.
template <class F>
auto located(const Loaded& l, F f) -> decltype(f()) {
  try {
    return f();
  } catch (const TypeError& e) {
    throw LanguageError(where(&l.unit, l.file, e.node) + ": type error: " + e.what());
  } catch (const ProjectionError& e) {
    throw LanguageError(where(&l.unit, l.file, e.node) + ": projection error: " + e.what());
  }
}

Loaded load(const std::string& file, bool check = true) {
  std::string text = read_file(file);
  Loaded l{file, {}, nullptr};
  try {
    l.unit = parse_program(text);
  } catch (const ParseError& e) {
    throw LanguageError(file + ":" + e.what());
  }
  if (check) l.checked = located(l, [&] { return std::make_unique<CheckedUnit>(check_unit(l.unit)); });
  return l;
}

void emit(const Options& o, const json& j, const std::string& text) {
  if (o.json_out) std::cout << j.dump(2) << "\n";
  else std::cout << text;
}

json label_json(const NetLabel& l) {
  return {{"kind", to_string(l.kind)}, {"participants", l.participants}, {"detail", l.detail}};
}

json check_json(const CheckResult& r) {
  json w = r.witness;
  return {{"theorem", r.theorem},
          {"status", to_string(r.status)},
          {"detail", r.detail},
          {"witness", w},
          {"states", r.states},
          {"steps", r.steps},
          {"lemmas",
           {{"transitions_checked", r.lemmas.transitions_checked},
            {"frame_violations", r.lemmas.frame_violations},
            {"restriction_violations", r.lemmas.restriction_violations},
            {"first_violation", r.lemmas.first_violation}}}};
}

std::string hex(std::uint64_t h) {
  std::ostringstream ss;
  ss << std::hex << h;
  return ss.str();
}

// ---------------------------------------------------------------- verbs

int cmd_parse(const Options& o) {
  json all = json::array();
  std::string text;
  for (auto& f : o.inputs) {
    Loaded l = load(f, false);
    std::string printed = print_program(l.unit);
    all.push_back({{"file", f}, {"processes", l.unit.processes}, {"defs", l.unit.def_order}, {"program", printed}});
    text += printed;
  }
  emit(o, all, text);
  return kOk;
}

int cmd_check(const Options& o) {
  json all = json::array();
  std::string text;
  for (auto& f : o.inputs) {
    Loaded l = load(f);
    json defs = json::object();
    for (auto& name : l.unit.def_order) {
      defs[name] = print(l.unit.defs.at(name).sig);
      text += "def " + name + " : " + print(l.unit.defs.at(name).sig) + "\n";
    }
    std::string ty = print(l.checked->main->type);
    text += "main : " + ty + "\n";
    all.push_back({{"file", f}, {"type", ty}, {"defs", defs}});
  }
  emit(o, all, text);
  return kOk;
}

int cmd_run(const Options& o) {
  Loaded l = load(o.inputs.at(0));
  bool keep = o.trace || !o.trace_json.empty();
  EvalResult r = eval(l.unit.main, l.unit.defs, o.fuel, keep);
  const char* kind = r.kind == EvalResult::Kind::Value ? "value" : r.kind == EvalResult::Kind::Timeout ? "timeout" : "stuck";
  json trace = json::array();
  std::string text;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    auto& t = r.trace[i];
    trace.push_back({{"step", i}, {"rule", t.rule}, {"redex", print(t.redex)}, {"contractum", print(t.contractum)}});
    if (o.trace) text += std::to_string(i) + " " + t.rule + ": " + print(t.redex) + "  ~>  " + print(t.contractum) + "\n";
  }
  if (!o.trace_json.empty()) write_file(o.trace_json, trace.dump(2) + "\n");
  json j = {{"result", kind}, {"value", r.final ? print(r.final) : ""}, {"steps", r.steps}};
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (o.trace) j["trace"] = trace;
  text += std::string(kind) + " after " + std::to_string(r.steps) + " steps: " + (r.final ? print(r.final) : "") + "\n";
  if (!r.reason.empty()) text += r.reason + "\n";
  emit(o, j, text);
  return r.kind == EvalResult::Kind::Stuck ? kLanguage : kOk;
}

int cmd_project(const Options& o) {
  Loaded l = load(o.inputs.at(0));
  LDefs defs = located(l, [&] { return project_defs(*l.checked); });
  Network net = located(l, [&] { return project_network(l.checked->main); });
  std::string defs_text;
  for (auto& [name, body] : defs) defs_text += "def " + name + " = " + print(body) + ";\n";

  json j = {{"defs", json::object()}, {"processes", json::object()}};
  for (auto& [name, body] : defs) j["defs"][name] = print(body);
  std::string text;
  if (o.all_roles) {
    fs::create_directories(o.out_dir);
    for (auto& [p, body] : net) {
      write_file((fs::path(o.out_dir) / (p + ".local")).string(), print(body) + "\n");
      j["processes"][p] = print(body);
      text += (fs::path(o.out_dir) / (p + ".local")).string() + "\n";
    }
    write_file((fs::path(o.out_dir) / "defs.local").string(), defs_text);
    text += (fs::path(o.out_dir) / "defs.local").string() + "\n";
  } else if (!o.role.empty()) {
    if (!l.unit.universe.count(o.role)) throw UsageError("unknown process '" + o.role + "'");
    auto it = net.find(o.role);
    LExprP body = it != net.end() ? it->second : located(l, [&] { return project_expr(l.checked->main, o.role); });
    j["processes"][o.role] = print(body);
    text = print(body) + "\n";
  } else {
    text = defs_text;
    for (auto& [p, body] : net) {
      j["processes"][p] = print(body);
      text += p + "[" + print(body) + "]\n";
    }
  }
  emit(o, j, text);
  return kOk;
}

int cmd_simulate(const Options& o) {
  Loaded l = load(o.inputs.at(0));
  Policy policy;
  if (o.policy == "random") policy = Policy::Random;
  else if (o.policy == "roundrobin") policy = Policy::RoundRobin;
  else throw UsageError("unknown policy '" + o.policy + "'");
  LDefs defs = located(l, [&] { return project_defs(*l.checked); });
  Network net = located(l, [&] { return project_network(l.checked->main); });
  RunResult r = run_network(net, defs, policy, o.seed, o.fuel);

  json trace = json::array();
  std::string text;
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    trace.push_back({{"label", label_json(r.labels[i])}, {"state_hash", hex(r.hashes[i])}});
    if (o.trace) text += std::to_string(i) + " " + r.labels[i].detail + "  #" + hex(r.hashes[i]) + "\n";
  }
  if (!o.trace_json.empty()) write_file(o.trace_json, trace.dump(2) + "\n");
  json finals = json::object();
  for (auto& [p, v] : r.final) finals[p] = print(v);
  json j = {{"result", to_string(r.kind)}, {"steps", r.steps}, {"final", finals}};
  if (o.trace) j["trace"] = trace;
  text += std::string(to_string(r.kind)) + " after " + std::to_string(r.steps) + " steps\n" + print_network(r.final) + "\n";
  emit(o, j, text);
  return r.kind == RunResult::Kind::Deadlock ? kViolation : kOk;
}

int cmd_verify(const Options& o) {
  if (o.theorem != "completeness" && o.theorem != "soundness" && o.theorem != "deadlock")
    throw UsageError("unknown theorem '" + o.theorem + "'");
  json reports = json::array();
  std::string text;
  int code = kOk;
  for (auto& f : o.inputs) {
    Loaded l = load(f);
    CheckResult r = located(l, [&] {
      Correspondence c(*l.checked);
      c.fuel = o.fuel;
      return o.theorem == "completeness" ? c.completeness(o.bound, o.up_to_bottom_apps)
             : o.theorem == "soundness"  ? c.soundness(o.depth, o.bound, !o.serial)
                                         : c.deadlock_freedom(o.depth, !o.serial);
    });
    json rep = check_json(r);
    rep["file"] = f;
    reports.push_back(rep);
    text += f + ": " + r.theorem + " " + to_string(r.status) + " (" + std::to_string(r.states) + " states, " +
            std::to_string(r.lemmas.transitions_checked) + " transitions lemma-checked)";
    if (!r.detail.empty()) text += ": " + r.detail;
    text += "\n";
    for (auto& w : r.witness) text += "  " + w + "\n";
    if (r.status != CheckResult::Status::Pass) code = kViolation;
  }
  if (!o.report_json.empty()) write_file(o.report_json, reports.dump(2) + "\n");
  emit(o, reports, text);
  return code;
}

int cmd_examples(const Options& o) {
  std::string dir = o.inputs.empty() ? POLYCHOR_CORPUS_DIR : o.inputs[0];
  std::vector<fs::path> files;
  for (auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".chor") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  json all = json::array();
  std::string text;
  int code = kOk;
  for (auto& f : files) {
    try {
      Loaded l = load(f.string());
      std::string ty = print(l.checked->main->type);
      all.push_back({{"file", f.string()}, {"type", ty}});
      text += f.filename().string() + " : " + ty + "\n";
    } catch (const std::exception& e) {
      all.push_back({{"file", f.string()}, {"error", e.what()}});
      text += f.filename().string() + " : error: " + e.what() + "\n";
      code = kLanguage;
    }
  }
  emit(o, all, text);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Choreographies with process polymorphism: check, project, simulate, verify"};
  app.set_version_flag("--version", POLYCHOR_VERSION);
  app.require_subcommand(1);
  Options o;
  std::string format = "text";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

  auto files = [&](CLI::App* sub, bool many) {
    auto* opt = sub->add_option("files", o.inputs, "Program file(s)");
    if (!many) opt->expected(1);
    opt->required();
  };
  auto* parse = app.add_subcommand("parse", "Parse and pretty-print");
  files(parse, true);
  auto* check = app.add_subcommand("check", "Kind- and type-check");
  files(check, true);
  auto* run = app.add_subcommand("run", "Evaluate the choreography");
  files(run, false);
  run->add_option("--fuel", o.fuel, "Step limit");
  run->add_flag("--trace", o.trace, "Print every reduction");
  run->add_option("--trace-json", o.trace_json, "Write the reduction trace as JSON");
  auto* project = app.add_subcommand("project", "Endpoint projection");
  files(project, false);
  project->add_option("--role", o.role, "Process to project to");
  project->add_flag("--all", o.all_roles, "Write <out>/<P>.local for every process plus <out>/defs.local");
  project->add_option("--out", o.out_dir, "Output directory for --all");
  auto* simulate = app.add_subcommand("simulate", "Run the projected network");
  files(simulate, false);
  simulate->add_option("--seed", o.seed, "Scheduler seed");
  simulate->add_option("--policy", o.policy, "random | roundrobin")->check(CLI::IsMember({"random", "roundrobin"}));
  simulate->add_option("--fuel", o.fuel, "Step limit");
  simulate->add_flag("--trace", o.trace, "Print every network step");
  simulate->add_option("--trace-json", o.trace_json, "Write the step trace as JSON");
  auto* verify = app.add_subcommand("verify", "Check projection correctness by bounded exploration");
  files(verify, true);
  verify->add_option("--theorem", o.theorem, "completeness | soundness | deadlock")
      ->check(CLI::IsMember({"completeness", "soundness", "deadlock"}));
  verify->add_option("--depth", o.depth, "Exploration depth");
  verify->add_option("--bound", o.bound, "Search bound per step (default 2|P|+4)");
  verify->add_option("--fuel", o.fuel, "Choreography step limit");
  verify->add_option("--report-json", o.report_json, "Write the report as JSON");
  verify->add_flag("--serial", o.serial, "Use the serial explorer");
  verify->add_flag("--up-to-bottom-apps", o.up_to_bottom_apps,
                   "Completeness: compare networks ignoring pending applications of bottom");
  auto* examples = app.add_subcommand("examples", "Check every program of the bundled corpus");
  examples->add_option("dir", o.inputs, "Corpus directory")->expected(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  o.json_out = format == "json";

  try {
    if (*parse) return cmd_parse(o);
    if (*check) return cmd_check(o);
    if (*run) return cmd_run(o);
    if (*project) return cmd_project(o);
    if (*simulate) return cmd_simulate(o);
    if (*verify) return cmd_verify(o);
    if (*examples) return cmd_examples(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const LanguageError& e) {
    std::cerr << e.what() << "\n";
    return kLanguage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kLanguage;
  }
  return kUsage;
}
