#include "doctest.h"
#include "gen.hpp"
#include "polychor/eval.hpp"
#include "polychor/syntax.hpp"
#include "polychor/typecheck.hpp"
#include "support.hpp"

using namespace polychor;

namespace {

const ProcSet kABC = {"Alice", "Bob", "Carol"};

ExprP ex(const std::string& s) { return parse_expr(s, kABC); }

StepResult step1(const std::string& s) { return step(ex(s), {}); }

std::vector<std::string> rule_names(const EvalResult& r) {
  std::vector<std::string> out;
  for (auto& s : r.trace) out.push_back(s.rule);
  return out;
}

long count_rule(const EvalResult& r, const std::string& rule) {
  long n = 0;
  for (auto& s : r.trace) n += s.rule == rule;
  return n;
}

// Every intermediate term has a type equivalent to the original, and the run ends in a value.
void check_preservation_and_progress(const CheckedUnit& cu, int& steps_seen) {
  EvalResult r = eval(cu.unit.main, cu.unit.defs, 10000, true);
  REQUIRE(r.kind == EvalResult::Kind::Value);
  CHECK(is_value(r.final));
  for (auto& s : r.trace) {
    TypedP t = type_of(cu.main_ctx, s.after);
    CHECK(type_equiv(cu.main_ctx, t->type, cu.main->type));
    CHECK(kind_equal(kind_of(cu.main_ctx, t->type), k_star()));
    ++steps_seen;
  }
}

}  // namespace

TEST_CASE("single steps") {
  StepResult c = step1("com[fn X::proc => Int@X] Alice Bob (5@Alice)");
  CHECK(c.rule == "Com");
  CHECK(alpha_eq(c.next, ex("5@Bob")));

  StepResult pair = step1("com[fn X::proc => Int@X * Int@Carol] Alice Bob (1@Alice, 2@Carol)");
  CHECK(alpha_eq(pair.next, ex("(1@Bob, 2@Carol)")));

  StepResult fn = step1("com[fn X::proc => Int@X -> Int@X] Alice Bob (\\x:Int@Alice. x)");
  CHECK(alpha_eq(fn.next, ex("\\x:Int@Bob. x")));

  StepResult sel = step1("select Alice Bob ok; 5@Alice");
  CHECK(sel.rule == "Sel");
  CHECK(alpha_eq(sel.next, ex("5@Alice")));

  StepResult tapp = step1("(/\\X::proc. 1@X) [Alice]");
  CHECK(tapp.rule == "AppTAbs");
  CHECK(alpha_eq(tapp.next, ex("1@Alice")));

  StepResult tnorm = step1("(/\\X::proc. 1@X) [(fn Y::proc => Y) Bob]");
  CHECK(alpha_eq(tnorm.next, ex("1@Bob")));

  CHECK(step1("case inr[()@Alice] 3@Alice of inl a => a | inr b => b").rule == "CaseR");
  CHECK(step1("fst (1@Alice, 2@Bob)").rule == "Proj1");
  CHECK(step1("snd (1@Alice, 2@Bob)").rule == "Proj2");

  StepResult inner = step1("(\\x:Int@Bob. x) ((\\y:Int@Alice. y) 1@Alice)");
  CHECK(inner.rule == "AppAbs");
  CHECK(alpha_eq(inner.redex, ex("(\\y:Int@Alice. y) 1@Alice")));
  CHECK(alpha_eq(inner.contractum, ex("1@Alice")));

  CHECK(step1("5@Alice").kind == StepResult::Kind::Value);
  CHECK(step1("5@Alice 3@Alice").kind == StepResult::Kind::Stuck);
}

TEST_CASE("values take no steps") {
  EvalResult r = eval(ex("(\\x:Int@Alice. x, 4@Bob)"), {}, 100);
  CHECK(r.kind == EvalResult::Kind::Value);
  CHECK(r.steps == 0);
}

TEST_CASE("bookseller trace") {
  SourceUnit u = testkit::load("bookseller");
  EvalResult r = eval(u.main, u.defs, 1000, true);
  REQUIRE(r.kind == EvalResult::Kind::Value);
  CHECK(r.steps == 12);
  CHECK(rule_names(r) == std::vector<std::string>{"Com", "AppAbs", "Def", "AppTAbs", "AppAbs", "Com", "AppAbs", "Def",
                                                  "AppTAbs", "AppAbs", "CaseL", "Sel"});
  CHECK(print(r.final) == "()@Seller");
  CHECK(r.trace.back().after == r.final);
}

TEST_CASE("divergent definition times out") {
  SourceUnit u = parse_program("processes Alice;\ndef loop : forall S::proc. Int@S = loop;\nmain = loop [Alice];");
  check_unit(u);
  EvalResult r = eval(u.main, u.defs, 500);
  CHECK(r.kind == EvalResult::Kind::Timeout);
  CHECK(r.steps == 500);
}

TEST_CASE("preservation and progress on the corpus") {
  int steps = 0;
  for (auto& name : testkit::corpus_names()) {
    INFO(name);
    check_preservation_and_progress(testkit::load_checked(name), steps);
  }
  CHECK(steps > 30);
}

TEST_CASE("preservation and progress on generated programs") {
  int steps = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    SourceUnit u = testkit::gen_program(seed);
    INFO("seed ", seed, "\n", print_program(u));
    check_preservation_and_progress(check_unit(u), steps);
  }
  CHECK(steps > 1000);
}

TEST_CASE("evaluation is deterministic") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    SourceUnit u = testkit::gen_program(seed);
    EvalResult a = eval(u.main, u.defs, 10000, true), b = eval(u.main, u.defs, 10000, true);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].rule == b.trace[i].rule);
      CHECK(alpha_eq(a.trace[i].after, b.trace[i].after));
    }
  }
}

TEST_CASE("erasing selections commutes with evaluation") {
  auto check_one = [](const SourceUnit& u) {
    Defs erased_defs;
    for (auto& [f, d] : u.defs) erased_defs[f] = Def{d.name, d.sig, erase_selects(d.body)};
    EvalResult a = eval(u.main, u.defs, 10000, true);
    EvalResult b = eval(erase_selects(u.main), erased_defs, 10000, true);
    REQUIRE(a.kind == EvalResult::Kind::Value);
    REQUIRE(b.kind == EvalResult::Kind::Value);
    CHECK(alpha_eq(erase_selects(a.final), b.final));
    CHECK(count_rule(a, "Com") == count_rule(b, "Com"));
    CHECK(count_rule(b, "Sel") == 0);
    CHECK(a.steps - count_rule(a, "Sel") == b.steps);
  };
  for (auto& name : testkit::corpus_names()) {
    INFO(name);
    check_one(testkit::load(name));
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    INFO("seed ", seed);
    check_one(testkit::gen_program(seed));
  }
}
