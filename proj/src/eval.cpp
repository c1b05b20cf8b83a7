#include "polychor/eval.hpp"

#include "polychor/typecheck.hpp"

namespace polychor {

namespace {

struct Red {
  enum class Kind { Step, Value, Stuck } kind = Kind::Value;
  ExprP next, redex, contractum;
  std::string rule, reason;
};

ExprP with_child(const ExprP& m, int which, ExprP v) {
  auto n = std::make_shared<Expr>(*m);
  (which == 0 ? n->a : which == 1 ? n->b : n->c) = std::move(v);
  return n;
}

Red contract(const ExprP& m, ExprP out, const char* rule) {
  Red r;
  r.kind = Red::Kind::Step;
  r.next = out;
  r.redex = m;
  r.contractum = std::move(out);
  r.rule = rule;
  return r;
}

Red stuck(const ExprP& m, std::string why) {
  Red r;
  r.kind = Red::Kind::Stuck;
  r.redex = m;
  r.reason = std::move(why);
  return r;
}

Red red(const ExprP& m, const Defs& d);

// Reduces child `which` if it is not a value; returns Value when it already is.
Red congruence(const ExprP& m, int which, const Defs& d) {
  const ExprP& kid = which == 0 ? m->a : which == 1 ? m->b : m->c;
  Red r = red(kid, d);
  if (r.kind == Red::Kind::Step) r.next = with_child(m, which, r.next);
  return r;
}

Red red(const ExprP& m, const Defs& d) {
  switch (m->tag) {
    case ExprTag::Var:
    case ExprTag::Unit:
    case ExprTag::Int:
    case ExprTag::Str:
    case ExprTag::Lam:
    case ExprTag::TLam:
    case ExprTag::Com: return Red{};
    case ExprTag::Fun: {
      auto it = d.find(m->name);
      if (it == d.end()) return stuck(m, "unknown function '" + m->name + "'");
      return contract(m, it->second.body, "Def");
    }
    case ExprTag::Select: return contract(m, m->a, "Sel");
    case ExprTag::App: {
      Red r = congruence(m, 0, d);
      if (r.kind != Red::Kind::Value) return r;
      r = congruence(m, 1, d);
      if (r.kind != Red::Kind::Value) return r;
      const ExprP& f = m->a;
      if (f->tag == ExprTag::Lam) return contract(m, subst_expr(f->a, f->name, m->b), "AppAbs");
      if (f->tag == ExprTag::Com) {
        if (f->src->tag != TypeTag::Proc || f->dst->tag != TypeTag::Proc)
          return stuck(m, "com endpoints are not process names");
        return contract(m, subst_proc(m->b, f->src->name, f->dst->name), "Com");
      }
      return stuck(m, "application of a non-function value");
    }
    case ExprTag::TApp: {
      Red r = congruence(m, 0, d);
      if (r.kind != Red::Kind::Value) return r;
      if (m->a->tag != ExprTag::TLam) return stuck(m, "type application of a non-polymorphic value");
      TypeP v = normalize(m->ty);
      return contract(m, subst_type_in_expr(m->a->a, m->a->name, v), "AppTAbs");
    }
    case ExprTag::Inl:
    case ExprTag::Inr: return congruence(m, 0, d);
    case ExprTag::Case: {
      Red r = congruence(m, 0, d);
      if (r.kind != Red::Kind::Value) return r;
      if (m->a->tag == ExprTag::Inl) return contract(m, subst_expr(m->b, m->name, m->a->a), "CaseL");
      if (m->a->tag == ExprTag::Inr) return contract(m, subst_expr(m->c, m->name2, m->a->a), "CaseR");
      return stuck(m, "case on a non-sum value");
    }
    case ExprTag::Pair: {
      Red r = congruence(m, 0, d);
      if (r.kind != Red::Kind::Value) return r;
      return congruence(m, 1, d);
    }
    case ExprTag::Fst:
    case ExprTag::Snd: {
      Red r = congruence(m, 0, d);
      if (r.kind != Red::Kind::Value) return r;
      if (m->a->tag != ExprTag::Pair) return stuck(m, "projection from a non-pair value");
      return m->tag == ExprTag::Fst ? contract(m, m->a->a, "Proj1") : contract(m, m->a->b, "Proj2");
    }
  }
  return stuck(m, "unknown term form");
}

}  // namespace

StepResult step(const ExprP& m, const Defs& d) {
  Red r = red(m, d);
  StepResult s;
  switch (r.kind) {
    case Red::Kind::Value:
      s.kind = StepResult::Kind::Value;
      s.next = m;
      break;
    case Red::Kind::Step:
      s.kind = StepResult::Kind::Stepped;
      s.next = r.next;
      s.rule = r.rule;
      s.redex = r.redex;
      s.contractum = r.contractum;
      break;
    case Red::Kind::Stuck:
      s.kind = StepResult::Kind::Stuck;
      s.redex = r.redex;
      s.reason = r.reason;
      break;
  }
  return s;
}

EvalResult eval(const ExprP& m, const Defs& d, std::int64_t fuel, bool keep_trace) {
  EvalResult out;
  ExprP cur = m;
  for (;;) {
    StepResult s = step(cur, d);
    if (s.kind == StepResult::Kind::Value) {
      out.kind = EvalResult::Kind::Value;
      out.final = cur;
      return out;
    }
    if (s.kind == StepResult::Kind::Stuck) {
      out.kind = EvalResult::Kind::Stuck;
      out.final = cur;
      out.reason = s.reason;
      return out;
    }
    if (out.steps >= fuel) {
      out.kind = EvalResult::Kind::Timeout;
      out.final = cur;
      return out;
    }
    ++out.steps;
    if (keep_trace) out.trace.push_back({s.rule, s.redex, s.contractum, s.next});
    cur = s.next;
  }
}

ExprP erase_selects(const ExprP& m) {
  if (!m) return m;
  if (m->tag == ExprTag::Select) return erase_selects(m->a);
  ExprP a = erase_selects(m->a), b = erase_selects(m->b), c = erase_selects(m->c);
  if (a == m->a && b == m->b && c == m->c) return m;
  auto n = std::make_shared<Expr>(*m);
  n->a = a;
  n->b = b;
  n->c = c;
  return n;
}

}  // namespace polychor
