#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "oracles.hpp"
#include "polychor/syntax.hpp"
#include "polychor/typecheck.hpp"
#include "support.hpp"

using namespace polychor;

namespace {

const ProcSet kABC = {"Alice", "Bob", "Carol"};

Ctx main_ctx(const ProcSet& u = kABC) { return initial_ctx(u, {}, true); }
TypeP ty(const std::string& s, const ProcSet& u = kABC) { return parse_type(s, u); }

TypeP type_of_text(const std::string& s, const ProcSet& u = kABC) {
  return type_of(main_ctx(u), parse_expr(s, u))->type;
}

std::string error_code(const std::string& s, const ProcSet& u = kABC) {
  try {
    type_of(main_ctx(u), parse_expr(s, u));
  } catch (const TypeError& e) {
    return e.code;
  }
  return "ok";
}

std::string def_error(const std::string& program) {
  try {
    check_defs(parse_program(program));
  } catch (const TypeError& e) {
    return e.code;
  }
  return "ok";
}

// Checks the type restriction lemma at every subterm, threading binders through the context.
void check_restriction(const Ctx& c, const TypeP& t, int& checked) {
  KindP k = kind_of(c, t);
  if (k_is_without(k)) {
    ProcSet seen = set_union(roles(t, c.universe), ftv(t, c.universe));
    CHECK(set_inter(seen, k_excluded(k)).empty());
    ++checked;
  }
  switch (t->tag) {
    case TypeTag::Forall:
    case TypeTag::TLam: check_restriction(ctx_bind_tyvar(c, t->name, t->kind), t->a, checked); return;
    case TypeTag::Var:
    case TypeTag::Proc: return;
    default:
      if (t->a && t->tag != TypeTag::Unit && t->tag != TypeTag::Int && t->tag != TypeTag::Str)
        check_restriction(c, t->a, checked);
      if (t->b) check_restriction(c, t->b, checked);
  }
}

}  // namespace

TEST_CASE("subkinding examples") {
  CHECK(subkind(k_without(k_proc(), {"A"}), k_proc()));
  CHECK(subkind(k_star(), k_without(k_star(), {})));
  CHECK_FALSE(subkind(k_without(k_proc(), {"A"}), k_without(k_proc(), {"A", "B"})));
  CHECK(subkind(k_without(k_proc(), {"A", "B"}), k_without(k_proc(), {"A"})));
  CHECK(subkind(k_arrow(k_without(k_proc(), {"A"}), k_star()), k_arrow(k_proc(), k_star())));
  CHECK_FALSE(subkind(k_proc(), k_star()));
}

TEST_CASE("subkinding matches the rule closure") {
  testkit::SubkindClosure closure({"A", "B", "C"}, 3);
  REQUIRE(closure.kinds.size() > 400);
  std::size_t related = 0;
  for (std::size_t i = 0; i < closure.kinds.size(); ++i)
    for (std::size_t j = 0; j < closure.kinds.size(); ++j) {
      bool expect = closure.leq[i][j];
      related += expect;
      if (subkind(closure.kinds[i], closure.kinds[j]) != expect) {
        INFO(print(closure.kinds[i]), " <= ", print(closure.kinds[j]), " expected ", expect);
        CHECK(false);
      }
    }
  CHECK(related > closure.kinds.size());
}

TEST_CASE("normalization") {
  CHECK(alpha_eq(normalize_type(main_ctx(), ty("(fn X::proc => Int@X) Alice")), ty("Int@Alice")));
  TypeP v = ty("forall X::proc. Int@X ->{Bob} Int@Alice");
  CHECK(alpha_eq(normalize_type(main_ctx(), v), v));
  TypeP nested = ty("(fn X::proc => X) ((fn Y::proc => Y) Alice)");
  CHECK(alpha_eq(normalize_type(main_ctx(), nested), t_proc("Alice")));
  CHECK(alpha_eq(testkit::reduce_leftmost_outermost(nested), t_proc("Alice")));
  CHECK_THROWS_AS(normalize_type(main_ctx(), ty("(fn X::proc => X) (Int@Alice)")), TypeError);
}

TEST_CASE("normalization strategies agree") {
  std::mt19937_64 rng(31);
  std::vector<std::string> procs(kABC.begin(), kABC.end());
  int reductions = 0;
  for (int i = 0; i < 1500; ++i) {
    TypeP t = testkit::gen_type_with_redexes(rng, procs, 1 + i % 4);
    INFO(print(t));
    int lo = 0, ri = 0;
    TypeP a = testkit::reduce_leftmost_outermost(t, &lo);
    TypeP b = testkit::reduce_rightmost_innermost(t, &ri);
    reductions += lo;
    CHECK(alpha_eq(a, b));
    CHECK(alpha_eq(normalize_type(main_ctx(), t), a));
    CHECK(is_type_value(a));
  }
  CHECK(reductions > 1500);
}

TEST_CASE("type equivalence") {
  Ctx c = main_ctx();
  CHECK(type_equiv(c, ty("(fn X::proc => Int@X) Alice"), ty("Int@Alice")));
  TypeP t = ty("Int@Alice * ()@Bob");
  CHECK(type_equiv(c, t, t));
  CHECK_FALSE(type_equiv(c, ty("Int@Alice ->{Bob} Int@Alice"), ty("Int@Alice -> Int@Alice")));
  CHECK(type_equiv(c, ty("forall X::proc. Int@X"), ty("forall Y::proc. Int@Y")));
}

TEST_CASE("kinds of types") {
  Ctx c = main_ctx();
  CHECK(kind_equal(kind_of(c, ty("Int@Alice")), k_star()));
  CHECK(kind_equal(kind_of(c, ty("forall X::proc. Int@X")), k_star()));
  Ctx cx = ctx_bind_tyvar(c, "X", k_without(k_proc(), {"Alice"}));
  CHECK(kind_equal(kind_of(cx, t_var("X")), k_without(k_proc(), {"Alice"})));
  CHECK(kind_equal(kind_of(c, ty("fn X::proc => Int@X")), k_arrow(k_proc(), k_star())));
  CHECK_THROWS_AS(kind_of(c, t_var("Nope")), TypeError);
}

TEST_CASE("kind preservation and type restriction") {
  std::mt19937_64 rng(32);
  std::vector<std::string> procs(kABC.begin(), kABC.end());
  Ctx c = main_ctx();
  int checked = 0;
  for (int i = 0; i < 1500; ++i) {
    TypeP t = testkit::gen_type_with_redexes(rng, procs, i % 5);
    INFO(print(t));
    KindP k = kind_of(c, t);
    TypeP v = normalize(t);
    CHECK(has_kind(c, v, k));
    CHECK(subkind(kind_of(c, v), k));
    check_restriction(c, t, checked);
    check_restriction(c, v, checked);
  }
  CHECK(checked > 100);
}

TEST_CASE("typing examples") {
  CHECK(alpha_eq(type_of_text("com[fn X::proc => Int@X] Alice Bob (5@Alice)"), ty("Int@Bob")));
  CHECK(alpha_eq(type_of_text("/\\X::proc. /\\Y::proc \\ {X}. com[fn Z::proc => Int@Z] X Y"),
                 ty("forall X::proc. forall Y::proc \\ {X}. Int@X -> Int@Y")));
  CHECK(alpha_eq(type_of_text("/\\X::proc. /\\Y::proc \\ {X}. com[fn Z::proc => Int@Z] X Y (5@X)"),
                 ty("forall X::proc. forall Y::proc \\ {X}. Int@Y")));
  CheckedUnit d = testkit::load_checked("delegation");
  const TypedP& head = d.main->kids[0]->kids[0]->kids[0];
  ProcSet u = d.unit.universe;
  CHECK(alpha_eq(head->type, parse_type("forall B::proc \\ {Seller, Seller2}. String@B ->{Seller, Seller2} "
                                        "((Int@B -> Bool@B) ->{Seller, Seller2} ()@B)",
                                        u)));
  CHECK(alpha_eq(d.main->type, parse_type("()@Buyer", u)));
}

TEST_CASE("type errors") {
  CHECK(error_code("(\\x:Int@Alice. x) ()@Alice") == "TypeMismatch");
  CHECK(error_code("y") == "UnboundVar");
  CHECK(error_code("5@Alice 3@Alice") == "NotAFunction");
  // Bob is neither in the annotation, the result type nor the via set.
  CHECK(error_code("\\x:Int@Alice. (\\y:()@Bob. x) ()@Bob") == "ProcessEscape");
  CHECK(error_code("\\x:Int@Alice via {Bob}. (\\y:()@Bob. x) ()@Bob") == "ok");
  CHECK(error_code("\\x:Int@Alice. 5@Bob") == "ok");
  CHECK(error_code("com[fn X::proc => Int@X * Int@Alice] Alice Bob") == "ComMentionsEndpoint");
  CHECK(error_code("/\\X::proc. com[fn Z::proc => Int@Z * Int@X] X Bob") == "ComMentionsEndpoint");
  CHECK(error_code("/\\X::*. select X Bob l; 1@Bob") == "SelectEndpointNotProc");
  CHECK(error_code("/\\X::*. 5@X") == "NotAProcess");
  CHECK(error_code("(/\\X::proc. 1@X) [Int@Alice]") == "KindMismatch");
  CHECK(error_code("\\x:Int@Y. x") == "UnboundTypeVar");
  CHECK(error_code("(/\\X::proc \\ {Bob}. 1@X) [Bob]") == "KindMismatch");
}

TEST_CASE("com checks mentioned names, not roles") {
  // roles of this transformer is every process, mn is empty.
  CHECK(error_code("com[fn X::proc => forall Y::proc. Int@Y] Alice Bob") == "ok");
  CHECK(error_code("com[fn X::proc => forall Y::proc \\ {Alice}. Int@Y] Alice Bob") == "ComMentionsEndpoint");
}

TEST_CASE("context operations") {
  Ctx c = main_ctx({"A", "B"});
  c.gamma.push_back(CtxEntry{EntryTag::TyVar, "Y", nullptr, k_without(k_proc(), {"X"})});
  c.gamma.push_back(CtxEntry{EntryTag::Var, "v", ty("Int@A", {"A", "B"}), nullptr});
  Ctx plus = ctx_plus(c, "X");
  CHECK(kind_equal(plus.lookup_type("Y")->kind, k_proc()));
  CHECK(alpha_eq(plus.lookup_term("v")->type, c.lookup_term("v")->type));

  Ctx r = ctx_restrict_sym(main_ctx({"A", "B"}), {"A"}, "X");
  CHECK(kind_equal(r.lookup_type("A")->kind, k_without(k_proc(), {"X"})));
  CHECK(kind_equal(r.lookup_type("B")->kind, k_proc()));
  Ctx r2 = ctx_restrict_sym(r, {"A"}, "Z");
  CHECK(kind_equal(r2.lookup_type("A")->kind, k_without(k_proc(), {"X", "Z"})));
}

TEST_CASE("ctx_plus is set difference on every kind") {
  std::mt19937_64 rng(33);
  const std::vector<std::string> names = {"A", "B", "X", "Y"};
  for (int i = 0; i < 500; ++i) {
    Ctx c = main_ctx({"A", "B"});
    for (int j = 0; j < 4; ++j) {
      ProcSet ex;
      for (auto& n : names)
        if (rng() % 2) ex.insert(n);
      c.gamma.push_back(CtxEntry{EntryTag::TyVar, "T" + std::to_string(j), nullptr,
                                 rng() % 2 ? k_without(k_proc(), ex) : k_arrow(k_without(k_proc(), ex), k_star())});
    }
    const std::string& v = names[rng() % names.size()];
    Ctx once = ctx_plus(c, v), twice = ctx_plus(once, v);
    for (std::size_t j = 0; j < c.gamma.size(); ++j) {
      if (!c.gamma[j].kind) continue;
      CHECK(kind_equal(once.gamma[j].kind, twice.gamma[j].kind));
      KindP before = c.gamma[j].kind, after = once.gamma[j].kind;
      if (before->tag == KindTag::Arrow) {
        before = before->a;
        after = after->a;
      }
      CHECK(k_excluded(after) == set_minus(k_excluded(before), {v}));
    }
  }
}

TEST_CASE("definitions") {
  CHECK(def_error("processes A;\nmain = 1@A;") == "ok");
  CHECK(def_error("processes Buyer, Seller;\n"
                  "def price_lookup : forall S::proc. String@S -> Int@S = /\\S::proc. \\t:String@S. 42@S;\n"
                  "main = 1@Seller;") == "ok");
  // Definitions are checked with no processes available, so a concrete seller cannot appear.
  CHECK(def_error("processes Buyer, Seller;\n"
                  "def price_lookup : String@Seller -> Int@Seller = \\t:String@Seller. 42@Seller;\n"
                  "main = 1@Seller;") != "ok");
  CHECK(def_error("processes A, B;\n"
                  "def f : forall S::proc. Int@S -> Int@S = /\\S::proc. \\n:Int@S. (\\u:()@A. n) ()@A;\n"
                  "main = 1@A;") != "ok");
  CHECK(def_error("processes A;\ndef f : Int@A -> Int@A = 1@A;\nmain = 1@A;") != "ok");
}

TEST_CASE("result types have kind star") {
  for (auto& name : testkit::corpus_names()) {
    CheckedUnit cu = testkit::load_checked(name);
    CHECK(kind_equal(kind_of(cu.main_ctx, cu.main->type), k_star()));
  }
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SourceUnit u = testkit::gen_program(seed);
    INFO("seed ", seed, "\n", print_program(u));
    CheckedUnit cu = check_unit(u);
    CHECK(kind_equal(kind_of(cu.main_ctx, cu.main->type), k_star()));
  }
}
