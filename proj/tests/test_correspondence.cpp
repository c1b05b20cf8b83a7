#include <set>

#include "doctest.h"
#include "gen.hpp"
#include "polychor/correspondence.hpp"
#include "polychor/eval.hpp"
#include "polychor/projection.hpp"
#include "polychor/syntax.hpp"
#include "support.hpp"

using namespace polychor;

namespace {

using Status = CheckResult::Status;

struct GraphShape {
  std::map<std::string, int> depth;
  std::set<std::pair<std::string, std::string>> edges;
  std::set<std::string> stuck;
};

GraphShape shape(const StateGraph& g) {
  GraphShape s;
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    s.depth[g.canon[i]] = g.depth[i];
    if (g.stuck[i]) s.stuck.insert(g.canon[i]);
    for (auto j : g.succ[i]) s.edges.emplace(g.canon[i], g.canon[j]);
  }
  return s;
}

// Renames the first offer label `from` found anywhere in l.
LExprP rename_offer_label(const LExprP& l, const std::string& from, const std::string& to, bool& done) {
  if (!l || done) return l;
  auto copy = std::make_shared<LExpr>(*l);
  if (l->tag == LExprTag::Offer && l->branches.count(from)) {
    auto br = copy->branches.extract(from);
    br.key() = to;
    copy->branches.insert(std::move(br));
    done = true;
    return copy;
  }
  copy->a = rename_offer_label(l->a, from, to, done);
  copy->b = rename_offer_label(l->b, from, to, done);
  copy->c = rename_offer_label(l->c, from, to, done);
  for (auto& [k, v] : copy->branches) v = rename_offer_label(v, from, to, done);
  return copy;
}

LExprP lx(const std::string& s) { return parse_local(s, {"Alice", "Bob"}); }

}  // namespace

TEST_CASE("serial and parallel explorers agree") {
  for (auto& name : testkit::corpus_names()) {
    CheckedUnit cu = testkit::load_checked(name);
    Correspondence c(cu);
    ExploreConfig cfg;
    cfg.depth = 7;
    StateGraph s = explore_serial(c.project(cu.main->expr), c.ldefs, cfg);
    StateGraph p = explore_parallel(c.project(cu.main->expr), c.ldefs, cfg);
    INFO(name);
    CHECK(s.states.size() == p.states.size());
    CHECK(s.transitions == p.transitions);
    CHECK(s.truncated == p.truncated);
    GraphShape a = shape(s), b = shape(p);
    CHECK(a.depth == b.depth);
    CHECK(a.edges == b.edges);
    CHECK(a.stuck == b.stuck);
    CHECK(s.lemmas.transitions_checked == p.lemmas.transitions_checked);
    CHECK(s.lemmas.frame_violations + s.lemmas.restriction_violations == 0);
  }
}

TEST_CASE("parallel exploration is independent of thread count") {
  CheckedUnit cu = testkit::load_checked("two_buyer");
  Correspondence c(cu);
  ExploreConfig cfg;
  cfg.depth = 8;
  Network root = c.project(cu.main->expr);
  StateGraph a = explore_parallel(root, c.ldefs, cfg);
  StateGraph b = explore_parallel(root, c.ldefs, cfg);
  CHECK(a.canon == b.canon);
  CHECK(a.succ == b.succ);
}

TEST_CASE("completeness on the corpus") {
  for (auto& name : testkit::corpus_names()) {
    CheckedUnit cu = testkit::load_checked(name);
    Correspondence c(cu);
    CheckResult r = c.completeness();
    INFO(name, ": ", r.detail);
    CHECK(r.status == Status::Pass);
    CHECK(r.steps == c.chor_trace().size() - 1);
    CHECK(r.lemmas.transitions_checked > 0);
  }
}

TEST_CASE("soundness") {
  CheckedUnit cu = testkit::load_checked("bookseller");
  Correspondence c(cu);
  CheckResult zero = c.soundness(0);
  CHECK(zero.status == Status::Pass);
  for (auto& name : {"bookseller", "case_merge"}) {
    CheckedUnit u = testkit::load_checked(name);
    CheckResult r = Correspondence(u).soundness(6);
    INFO(name, ": ", r.detail);
    CHECK(r.status == Status::Pass);
    CHECK(r.states >= 5);
  }
}

TEST_CASE("a corrupted offer label breaks soundness") {
  CheckedUnit cu = testkit::load_checked("bookseller");
  Correspondence c(cu);
  std::vector<Network> targets;
  for (auto& m : c.chor_trace()) targets.push_back(c.project(m));
  Network root = targets.front();
  bool done = false;
  root["Seller"] = rename_offer_label(root.at("Seller"), "Buy", "Bye", done);
  REQUIRE(done);
  CHECK(soundness_check(targets.front(), targets, c.ldefs, 8, 8).status == Status::Pass);
  CheckResult r = soundness_check(root, targets, c.ldefs, 8, 8);
  CHECK(r.status == Status::Violation);
  CHECK_FALSE(r.witness.empty());
}

TEST_CASE("deadlock freedom and its negative control") {
  for (auto& name : testkit::corpus_names()) {
    CheckedUnit cu = testkit::load_checked(name);
    CheckResult r = Correspondence(cu).deadlock_freedom(6);
    INFO(name, ": ", r.detail);
    CHECK(r.status == Status::Pass);
  }
  CHECK(deadlock_check({{"Alice", lx("1")}, {"Bob", lx("⊥")}}, {}, 8).status == Status::Pass);
  CheckResult bad = deadlock_check({{"Alice", lx("send[Bob] 1")}, {"Bob", lx("send[Alice] 2")}}, {}, 8);
  CHECK(bad.status == Status::Violation);
  CHECK(bad.detail.find("depth 0") != std::string::npos);
}

TEST_CASE("transition lemma checker catches tampering") {
  Network n = {{"Alice", lx("(\\x:Int. x) 1")}, {"Bob", lx("(\\y:Int. y) 2")}};
  auto steps = net_transitions(n, {});
  REQUIRE(steps.size() == 2);
  for (auto& s : steps) CHECK(check_transition_lemmas(n, s, {}) == "");
  NetStep tampered = steps[0];
  const std::string other = tampered.label.participants[0] == "Alice" ? "Bob" : "Alice";
  tampered.next[other] = lx("7");
  CHECK(check_transition_lemmas(n, tampered, {}).rfind("frame", 0) == 0);
  NetStep invented = steps[0];
  invented.next[invented.label.participants[0]] = lx("99");
  CHECK(check_transition_lemmas(n, invented, {}).rfind("restriction", 0) == 0);
}

TEST_CASE("both communication orientations agree on the corpus") {
  for (auto& name : testkit::corpus_names()) {
    CheckedUnit cu = testkit::load_checked(name);
    Correspondence c(cu);
    ExploreConfig cfg;
    cfg.depth = 8;
    Network root = c.project(cu.main->expr);
    GraphShape renamed = shape(explore_serial(root, c.ldefs, cfg));
    cfg.com_rule = ComRule::Verbatim;
    GraphShape verbatim = shape(explore_serial(root, c.ldefs, cfg));
    INFO(name);
    CHECK(renamed.edges == verbatim.edges);
  }
}

TEST_CASE("generated programs project and run") {
  int strict = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    CheckedUnit cu = check_unit(testkit::gen_program(seed));
    INFO("seed ", seed, "\n", print_program(cu.unit));
    Correspondence c(cu);
    Network root = c.project(cu.main->expr);
    for (std::uint64_t s = 0; s < 3; ++s)
      CHECK(run_network(root, c.ldefs, Policy::Random, s, 100000).kind == RunResult::Kind::AllValues);
    CheckResult r = c.completeness(-1, true);
    INFO(r.detail);
    CHECK(r.status == Status::Pass);
    strict += c.completeness().status == Status::Pass;
  }
  // Most programs never strand a bottom application, so the plain check holds too.
  CHECK(strict > 40);
}

TEST_CASE("pending bottom applications") {
  // A function whose projection only becomes ⊥ after a step leaves ⊥ in head position.
  CHECK(lalpha_eq(strip_bottom_apps(lx("⊥ (send[Bob] 1)")), lx("send[Bob] 1")));
  CHECK(lalpha_eq(strip_bottom_apps(lx("(\\x:Int. ⊥ (x, 2)) 1")), lx("(\\x:Int. (x, 2)) 1")));
  CHECK(le_is_bot(strip_bottom_apps(lx("⊥ ⊥"))));
  Network n = {{"Alice", lx("⊥ (send[Bob] 1)")}, {"Bob", lx("recv[Alice] ⊥")}};
  RunResult r = run_network(n, {}, Policy::RoundRobin, 0, 10);
  CHECK(r.kind == RunResult::Kind::AllValues);
  CHECK(r.steps == 2);
  // Evaluation may build a pair of bottoms; it collapses so that NBot can fire.
  Network pair = {{"Alice", lx("⊥ (choose[Bob] go; ⊥, ⊥)")}, {"Bob", lx("offer[Alice]{go: 1}")}};
  RunResult rp = run_network(pair, {}, Policy::RoundRobin, 0, 10);
  CHECK(rp.kind == RunResult::Kind::AllValues);
  CHECK(le_is_bot(rp.final.at("Alice")));
}

TEST_CASE("a divergent definition keeps every process running") {
  SourceUnit u = parse_program(
      "processes A, B;\n"
      "def loop : forall S::proc. forall R::proc. Int@S -> Int@R = loop;\n"
      "main = loop [A] [B] 1@A;");
  CheckedUnit cu = check_unit(u);
  CHECK(eval(u.main, u.defs, 2000).kind == EvalResult::Kind::Timeout);
  Correspondence c(cu);
  Network root = c.project(cu.main->expr);
  REQUIRE(root.size() == 2);
  for (auto policy : {Policy::Random, Policy::RoundRobin}) {
    RunResult r = run_network(root, c.ldefs, policy, 3, 2000);
    CHECK(r.kind == RunResult::Kind::Timeout);
    for (auto& [p, l] : r.final) {
      INFO(p, ": ", print(l));
      CHECK_FALSE(is_lvalue(l));
    }
  }
}
