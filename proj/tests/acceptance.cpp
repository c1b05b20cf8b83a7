// Acceptance run: one PASS/FAIL line per criterion, exit code 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gen.hpp"
#include "polychor/correspondence.hpp"
#include "polychor/eval.hpp"
#include "polychor/projection.hpp"
#include "polychor/syntax.hpp"
#include "support.hpp"

using namespace polychor;
using Status = CheckResult::Status;

namespace {

// Wall-clock limits in seconds, per criterion.
constexpr double kTypingLimit = 1.0;
constexpr double kTheoremSuiteLimit = 60.0;
constexpr double kCompletenessLimit = 60.0;
constexpr double kSoundnessLimit = 120.0;
constexpr double kDeadlockLimit = 120.0;
constexpr double kMergeLimit = 30.0;
constexpr double kPipelineLimit = 60.0;

constexpr int kGeneratedPrograms = 500;
constexpr int kMergeSamples = 10000;
constexpr int kExploreDepth = 8;
constexpr int kSimulationSeeds = 10;

struct Outcome {
  bool ok = true;
  std::string note;
  void fail(const std::string& why) {
    if (ok) note = why;
    ok = false;
  }
};

// Lemma counts gathered by the soundness and deadlock explorations.
LemmaReport g_lemmas;

void add_lemmas(const LemmaReport& r) {
  g_lemmas.transitions_checked += r.transitions_checked;
  g_lemmas.frame_violations += r.frame_violations;
  g_lemmas.restriction_violations += r.restriction_violations;
  if (g_lemmas.first_violation.empty()) g_lemmas.first_violation = r.first_violation;
}

int g_failures = 0;

void criterion(const std::string& name, double limit, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit > 0 && secs >= limit) o.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(limit) + " s");
  if (!o.ok) ++g_failures;
  std::printf("%s %s (%.2f s)%s%s\n", o.ok ? "PASS" : "FAIL", name.c_str(), secs, o.note.empty() ? "" : ": ",
              o.note.c_str());
  std::fflush(stdout);
}

void typing(Outcome& o) {
  const ProcSet u = {"Alice", "Bob"};
  Ctx c = initial_ctx(u, {}, true);
  auto expect = [&](const std::string& src, const std::string& want) {
    TypeP got = normalize(type_of(c, parse_expr(src, u))->type);
    if (!alpha_eq(got, normalize(parse_type(want, u)))) o.fail(src + " : " + print(got));
  };
  expect("com[fn X::proc => Int@X] Alice Bob (5@Alice)", "Int@Bob");
  expect("/\\X::proc. /\\Y::proc \\ {X}. com[fn Z::proc => Int@Z] X Y",
         "forall X::proc. forall Y::proc \\ {X}. Int@X -> Int@Y");

  CheckedUnit d = testkit::load_checked("delegation");
  const TypedP& head = d.main->kids[0]->kids[0]->kids[0];
  TypeP want = parse_type(
      "forall B::proc \\ {Seller, Seller2}. String@B ->{Seller, Seller2} ((Int@B -> Bool@B) ->{Seller, Seller2} ()@B)",
      d.unit.universe);
  if (!alpha_eq(normalize(head->type), normalize(want))) o.fail("delegation: " + print(head->type));
}

// Every embedded type keeps its kind under normalization.
void kinds_preserved(const TypedP& t, int& checked, Outcome& o) {
  const ExprP& e = t->expr;
  if (e->ty && t->type_kind) {
    ++checked;
    if (!has_kind(*t->ctx, normalize(e->ty), t->type_kind)) o.fail("kind of " + print(e->ty) + " not preserved");
  }
  for (auto& k : t->kids) kinds_preserved(k, checked, o);
}

void theorem_suite(Outcome& o) {
  std::vector<CheckedUnit> units;
  for (auto& name : testkit::corpus_names()) units.push_back(testkit::load_checked(name));
  testkit::ProgramGenConfig cfg;
  cfg.max_procs = 4;
  cfg.depth = 6;
  for (int seed = 0; seed < kGeneratedPrograms; ++seed) units.push_back(check_unit(testkit::gen_program(seed, cfg)));

  long steps = 0;
  int kinds = 0;
  for (auto& cu : units) {
    kinds_preserved(cu.main, kinds, o);
    for (auto& [f, d] : cu.defs) kinds_preserved(d, kinds, o);
    EvalResult r = eval(cu.unit.main, cu.unit.defs, 100000, true);
    // Progress: the run never gets stuck on a non-value.
    if (r.kind != EvalResult::Kind::Value) o.fail("no value: " + print(cu.unit.main) + " " + r.reason);
    for (auto& s : r.trace) {
      ++steps;
      TypedP t = type_of(cu.main_ctx, s.after);
      if (!type_equiv(cu.main_ctx, t->type, cu.main->type))
        o.fail("type changed at " + print(s.after) + ": " + print(t->type));
      kinds_preserved(t, kinds, o);
    }
  }
  if (o.ok)
    o.note = std::to_string(units.size()) + " programs, " + std::to_string(steps) + " steps, " +
             std::to_string(kinds) + " kinded types";
}

void completeness(Outcome& o) {
  std::uint64_t states = 0;
  for (auto& name : testkit::corpus_names()) {
    CheckedUnit cu = testkit::load_checked(name);
    CheckResult r = Correspondence(cu).completeness();
    states += r.states;
    if (r.status != Status::Pass) o.fail(name + ": " + to_string(r.status) + " " + r.detail);
  }
  if (o.ok) o.note = std::to_string(states) + " states searched";
}

void soundness(Outcome& o) {
  std::string counts;
  for (auto& name : {"bookseller", "two_buyer", "case_merge"}) {
    CheckedUnit cu = testkit::load_checked(name);
    CheckResult r = Correspondence(cu).soundness(kExploreDepth);
    add_lemmas(r.lemmas);
    counts += std::string(counts.empty() ? "" : ", ") + name + " " + std::to_string(r.states);
    if (r.status != Status::Pass) o.fail(std::string(name) + ": " + to_string(r.status) + " " + r.detail);
  }
  if (o.ok) o.note = "states: " + counts;
}

void deadlock(Outcome& o) {
  for (auto& name : testkit::corpus_names()) {
    CheckedUnit cu = testkit::load_checked(name);
    CheckResult r = Correspondence(cu).deadlock_freedom(kExploreDepth);
    add_lemmas(r.lemmas);
    if (r.status != Status::Pass) o.fail(name + ": " + to_string(r.status) + " " + r.detail);
  }
  const ProcSet u = {"Alice", "Bob"};
  Network control = {{"Alice", parse_local("send[Bob] 1", u)}, {"Bob", parse_local("send[Alice] 2", u)}};
  CheckResult bad = deadlock_check(control, {}, kExploreDepth);
  add_lemmas(bad.lemmas);
  if (bad.status != Status::Violation) o.fail("negative control not flagged");
}

void golden(Outcome& o) {
  CheckedUnit cu = testkit::load_checked("bookseller_service");
  std::set<std::string> defs;
  for (auto& [f, d] : cu.unit.defs) defs.insert(f);
  LExprP want = parse_local(testkit::read_file(testkit::golden_path("seller.local")), cu.unit.universe, defs);
  LExprP got = project_expr(cu.main, "Seller");
  if (!lalpha_eq(got, want)) return o.fail("got " + print(got));
  // The buyer abstraction splits on identity: identities in the then-branch, the offer in the else-branch.
  LExprP abs = got->a->a->a;
  if (abs->tag != LExprTag::TLam || abs->a->tag != LExprTag::AmI) return o.fail("no ami split");
  const std::string then_branch = print(abs->a->a), else_branch = print(abs->a->b);
  if (then_branch.find("(\\x:String. x)") == std::string::npos || then_branch.find("(\\x:Int. x)") == std::string::npos)
    o.fail("then-branch lacks the identity functions");
  if (else_branch.find("offer[B]{Buy: (), Quit: ()}") == std::string::npos) o.fail("else-branch lacks the offer");
}

// Offer union, checked one level down: labels are the union and shared branches merge.
bool offer_union_holds(const LExprP& a, const LExprP& b, const LExprP& m) {
  if (a->tag != LExprTag::Offer || !lalpha_eq(a->who, b->who)) return true;
  if (m->tag != LExprTag::Offer) return false;
  std::set<std::string> labels;
  for (auto& [l, x] : a->branches) labels.insert(l);
  for (auto& [l, x] : b->branches) labels.insert(l);
  if (m->branches.size() != labels.size()) return false;
  for (auto& l : labels) {
    auto ia = a->branches.find(l), ib = b->branches.find(l), im = m->branches.find(l);
    if (im == m->branches.end()) return false;
    LExprP want = ia == a->branches.end() ? ib->second : ia->second;
    if (ia != a->branches.end() && ib != b->branches.end()) {
      auto sub = merge(ia->second, ib->second);
      if (!sub) return false;
      want = *sub;
    }
    if (!lalpha_eq(im->second, want)) return false;
  }
  return true;
}

void merge_algebra(Outcome& o) {
  std::mt19937_64 rng(7);
  int defined = 0, assoc = 0, unions = 0;
  for (int i = 0; i < kMergeSamples; ++i) {
    LExprP base = testkit::gen_local(rng, 4);
    LExprP a = testkit::vary_local(rng, base), b = testkit::vary_local(rng, base), c = testkit::vary_local(rng, base);
    auto ab = merge(a, b), ba = merge(b, a);
    auto aa = merge(a, a);
    if (!aa || !lalpha_eq(*aa, a)) o.fail("idempotence: " + print(a));
    if (ab.has_value() != ba.has_value() || (ab && !lalpha_eq(*ab, *ba)))
      o.fail("commutativity: " + print(a) + " | " + print(b));
    if (!ab) continue;
    ++defined;
    if (a->tag == LExprTag::Offer) {
      ++unions;
      if (!offer_union_holds(a, b, *ab)) o.fail("offer union: " + print(a) + " | " + print(b));
    }
    auto bc = merge(b, c), ac = merge(a, c);
    if (bc && ac) {
      ++assoc;
      auto left = merge(*ab, c), right = merge(a, *bc);
      if (!left || !right || !lalpha_eq(*left, *right)) o.fail("associativity: " + print(a));
    }
  }
  if (defined < kMergeSamples / 4 || assoc < kMergeSamples / 8 || unions < 100)
    o.fail("too few defined merges: " + std::to_string(defined) + "/" + std::to_string(assoc) + "/" +
           std::to_string(unions));
  if (o.ok)
    o.note = std::to_string(defined) + " defined pairs, " + std::to_string(assoc) + " triples, " +
             std::to_string(unions) + " offer unions";
}

void lemmas(Outcome& o) {
  if (g_lemmas.transitions_checked == 0) return o.fail("no transitions were checked");
  if (g_lemmas.frame_violations || g_lemmas.restriction_violations) return o.fail(g_lemmas.first_violation);
  o.note = std::to_string(g_lemmas.transitions_checked) + " transitions";
}

void pipeline(Outcome& o) {
  for (auto& name : testkit::corpus_names()) {
    CheckedUnit cu = check_unit(parse_program(testkit::read_file(testkit::corpus_path(name))));
    Correspondence c(cu);
    Network root = c.project(cu.main->expr);
    for (int seed = 0; seed < kSimulationSeeds; ++seed)
      if (run_network(root, c.ldefs, Policy::Random, seed, 100000).kind != RunResult::Kind::AllValues)
        o.fail(name + ": simulation seed " + std::to_string(seed));
    if (c.completeness().status != Status::Pass) o.fail(name + ": completeness");
    if (c.deadlock_freedom(kExploreDepth).status != Status::Pass) o.fail(name + ": deadlock");
  }
}

}  // namespace

int main() {
  criterion("1 typing examples", kTypingLimit, typing);
  criterion("2 preservation, progress and kind preservation", kTheoremSuiteLimit, theorem_suite);
  criterion("3 completeness on the corpus", kCompletenessLimit, completeness);
  criterion("4 soundness at depth 8", kSoundnessLimit, soundness);
  criterion("5 deadlock freedom at depth 8", kDeadlockLimit, deadlock);
  criterion("6 golden Seller projection", 0, golden);
  criterion("7 merge algebra", kMergeLimit, merge_algebra);
  criterion("8 frame and restriction lemmas", 0, lemmas);
  criterion("corpus pipeline", kPipelineLimit, pipeline);
  std::printf("%d failed\n", g_failures);
  return g_failures ? 1 : 0;
}
