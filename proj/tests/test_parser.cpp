#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "polychor/projection.hpp"
#include "polychor/syntax.hpp"
#include "polychor/typecheck.hpp"
#include "support.hpp"

using namespace polychor;

namespace {

const ProcSet kAB = {"Alice", "Bob"};

bool same_program(const SourceUnit& a, const SourceUnit& b) {
  if (a.processes != b.processes || a.def_order != b.def_order) return false;
  for (auto& [name, d] : a.defs) {
    auto it = b.defs.find(name);
    if (it == b.defs.end() || !alpha_eq(d.sig, it->second.sig) || !alpha_eq(d.body, it->second.body)) return false;
  }
  return alpha_eq(a.main, b.main);
}

std::string parse_error_of(const std::string& src) {
  try {
    parse_program(src);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("literals and com") {
  ExprP five = parse_expr("5@Alice", kAB);
  REQUIRE(five->tag == ExprTag::Int);
  CHECK(five->n == 5);
  CHECK(five->ty->tag == TypeTag::Proc);
  CHECK(five->ty->name == "Alice");

  ExprP m = parse_expr("com[fn X::proc => Int@X] Alice Bob (5@Alice)", kAB);
  REQUIRE(m->tag == ExprTag::App);
  REQUIRE(m->a->tag == ExprTag::Com);
  CHECK(m->a->src->name == "Alice");
  CHECK(m->a->dst->name == "Bob");
  CHECK(print(m->a->ty) == "fn X::proc => Int@X");
  CHECK(alpha_eq(m->b, five));
}

TEST_CASE("let and if are sugar") {
  ExprP m = parse_expr("let x : Int@Alice = 1@Alice in x", kAB);
  REQUIRE(m->tag == ExprTag::App);
  REQUIRE(m->a->tag == ExprTag::Lam);
  CHECK(m->a->name == "x");
  CHECK(print(m->a->ty) == "Int@Alice");
  CHECK(m->a->a->tag == ExprTag::Var);
  CHECK(m->b->n == 1);

  ExprP c = parse_expr("if b then 1@Alice else 2@Alice", kAB);
  REQUIRE(c->tag == ExprTag::Case);
  CHECK(c->name == c->name2);
  CHECK(c->name != "b");
  CHECK(c->b->n == 1);
  CHECK(c->c->n == 2);
  // The bound name must avoid the branches' free variables.
  ExprP d = parse_expr("if b then _c0 else 2@Alice", kAB);
  CHECK(d->name != "_c0");
  CHECK(free_vars(d) == std::set<std::string>{"b", "_c0"});
}

TEST_CASE("sugar preserves typability") {
  ProcSet u = {"Alice", "Bob"};
  Ctx c = initial_ctx(u, {}, true);
  ExprP sugared = parse_expr("let x : Int@Alice = 1@Alice in if inl[()@Alice] ()@Alice then x else 2@Alice", u);
  ExprP plain = parse_expr(
      "(\\x:Int@Alice via {Alice, Bob}. case inl[()@Alice] ()@Alice of inl y => x | inr y => 2@Alice) 1@Alice", u);
  CHECK(alpha_eq(type_of(c, sugared)->type, type_of(c, plain)->type));
}

TEST_CASE("printing") {
  CHECK(print(e_int(5, t_proc("Alice"))) == "5@Alice");
  CHECK(print(parse_type("Int@Alice ->{Bob} Int@Alice", kAB)) == "Int@Alice ->{Bob} Int@Alice");
  CHECK(print(parse_kind("proc \\ {Alice}", kAB)) == "proc \\ {Alice}");
}

TEST_CASE("print then parse is the identity on the corpus") {
  for (auto& name : testkit::corpus_names()) {
    SourceUnit u = testkit::load(name);
    std::string once = print_program(u);
    SourceUnit back = parse_program(once);
    INFO(name);
    CHECK(same_program(u, back));
    CHECK(print_program(back) == once);
  }
}

TEST_CASE("print then parse is the identity on generated programs") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    SourceUnit u = testkit::gen_program(seed);
    std::string text = print_program(u);
    INFO("seed ", seed, "\n", text);
    SourceUnit back = parse_program(text);
    CHECK(same_program(u, back));
  }
}

TEST_CASE("print then parse is the identity on arbitrary terms") {
  std::mt19937_64 rng(21);
  ProcSet u = {"A", "B"};
  for (int i = 0; i < 2000; ++i) {
    ExprP m = testkit::gen_raw_expr(rng, 5);
    TypeP t = testkit::gen_raw_type(rng, 4);
    INFO(print(m), "  ::  ", print(t));
    CHECK(alpha_eq(parse_expr(print(m), u), m));
    CHECK(alpha_eq(parse_type(print(t), u), t));
  }
}

TEST_CASE("local terms round trip") {
  std::mt19937_64 rng(22);
  ProcSet u = {"A", "B"};
  for (int i = 0; i < 2000; ++i) {
    LExprP l = testkit::gen_local(rng, 4);
    INFO(print(l));
    CHECK(lalpha_eq(parse_local(print(l), u), l));
  }
  for (auto& name : testkit::corpus_names()) {
    CheckedUnit cu = testkit::load_checked(name);
    std::set<std::string> defs;
    for (auto& [f, d] : cu.unit.defs) defs.insert(f);
    for (auto& p : network_domain(cu.main)) {
      LExprP l = project_expr(cu.main, p);
      INFO(name, " at ", p, ": ", print(l));
      CHECK(lalpha_eq(parse_local(print(l), cu.unit.universe, defs), l));
    }
  }
}

TEST_CASE("canonical formatting of the bookseller service") {
  SourceUnit u = testkit::load("bookseller_service");
  CHECK(print_program(u) == testkit::read_file(testkit::golden_path("bookseller_service.print")));
}

TEST_CASE("parse errors") {
  std::string e = parse_error_of("processes Alice;\nmain = 5@Alice +;");
  CHECK(e.rfind("2:", 0) == 0);
  CHECK(parse_error_of("processes Alice;\nmain = 5@Carol;").find("unknown process name 'Carol'") != std::string::npos);
  CHECK(parse_error_of("processes A;\ndef f : Int@A = 1@A;\ndef f : Int@A = 1@A;\nmain = f;")
            .find("duplicate") != std::string::npos);
  CHECK(parse_error_of("processes A;\nmain = \\send:Int@A. send;").find("keyword") != std::string::npos);
  CHECK(parse_error_of("processes A\nmain = 1@A;").rfind("2:1:", 0) == 0);
}
