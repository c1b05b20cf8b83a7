#include "polychor/projection.hpp"

#include "polychor/syntax.hpp"

namespace polychor {

namespace {

bool excludes(const KindP& k, const std::string& p) { return k && k_is_without(k) && k->ex.count(p); }

// Context extended so that p is a usable process name (needed for the stand-in process).
Ctx with_process(Ctx c, const std::string& p) {
  if (!c.universe.count(p)) {
    c.universe.insert(p);
    c.gamma.insert(c.gamma.begin(), CtxEntry{EntryTag::Proc, p, nullptr, k_proc()});
  }
  c.theta.insert(p);
  return c;
}

struct TypeProjector {
  const std::string& p;

  LTypeP run(const Ctx& c, const TypeP& t) {
    switch (t->tag) {
      case TypeTag::Var: {
        const CtxEntry* e = c.lookup_type(t->name);
        if (e && e->kind && excludes(e->kind, p) && k_base(e->kind)->tag != KindTag::Proc) return lt_bot();
        return lt_var(t->name);
      }
      case TypeTag::Proc: return lt_proc(t->name);
      case TypeTag::Unit:
      case TypeTag::Int:
      case TypeTag::Str: {
        if (t->a->tag != TypeTag::Proc || t->a->name != p) return lt_bot();
        return t->tag == TypeTag::Unit ? lt_unit() : t->tag == TypeTag::Int ? lt_int() : lt_str();
      }
      case TypeTag::Sum:
      case TypeTag::Prod: {
        LTypeP a = run(c, t->a), b = run(c, t->b);
        if (lt_is_bot(a) && lt_is_bot(b)) return lt_bot();
        return t->tag == TypeTag::Sum ? lt_sum(a, b) : lt_prod(a, b);
      }
      case TypeTag::Arrow: {
        LTypeP a = run(c, t->a), b = run(c, t->b);
        // Bottom only when p is absent from both sides and from rho, as for products and sums.
        if (t->rho.count(p) || !lt_is_bot(a) || !lt_is_bot(b)) return lt_arrow(a, b);
        return lt_bot();
      }
      case TypeTag::Forall:
      case TypeTag::TLam: {
        Ctx inner = ctx_bind_tyvar(c, t->name, t->kind);
        LTypeP body = run(inner, t->a);
        if (lt_is_bot(body) && excludes(t->kind, p)) return lt_bot();
        if (k_is_procish(t->kind)) {
          LTypeP mine = run(with_process(c, p), subst_type(t->a, t->name, t_proc(p)));
          body = lt_ami(lt_var(t->name), mine, body);
        }
        return t->tag == TypeTag::Forall ? lt_forall(t->name, body) : lt_tlam(t->name, body);
      }
      case TypeTag::App: {
        LTypeP f = run(c, t->a), x = run(c, t->b);
        if (lt_is_bot(f) && lt_is_bot(x)) return lt_bot();
        if (lt_is_bot(x)) {
          KindP k;
          try {
            k = kind_of(c, t->b);
          } catch (const TypeError&) {
          }
          if (excludes(k, p)) return f;
        }
        if (lt_is_bot(f)) return x;
        return lt_app(f, x);
      }
    }
    return lt_bot();
  }
};

Ctx relaxed(const Ctx& c) {
  Ctx r = c;
  r.enforce_theta = false;
  return r;
}

class Projector {
 public:
  explicit Projector(std::string p) : p_(std::move(p)) {}

  LExprP run(const TypedP& tm) {
    const ExprP& m = tm->expr;
    const Ctx& c = *tm->ctx;
    if (m->tag != ExprTag::Var && uninvolved(tm)) return le_bot();
    switch (m->tag) {
      case ExprTag::Var:
        return lt_is_bot(type(c, tm->type)) ? le_bot() : le_var(m->name);
      case ExprTag::Fun: return le_fun(m->name);
      case ExprTag::Unit:
      case ExprTag::Int:
      case ExprTag::Str: {
        TypeP loc = normalize(m->ty);
        if (loc->tag != TypeTag::Proc || loc->name != p_) return le_bot();
        return m->tag == ExprTag::Unit ? le_unit() : m->tag == ExprTag::Int ? le_int(m->n) : le_str(m->str);
      }
      case ExprTag::Lam: {
        LTypeP ann = type(c, normalize(m->ty));
        LExprP body = run(tm->kids[0]);
        if (le_is_bot(body) && lt_is_bot(ann)) return le_bot();
        return le_lam(m->name, ann, body);
      }
      case ExprTag::App: {
        LExprP f = run(tm->kids[0]), x = run(tm->kids[1]);
        if (le_is_bot(f) && le_is_bot(x)) return le_bot();
        if (roles(tm->kids[0]->type, c.universe).count(p_) || (!le_is_bot(f) && !le_is_bot(x)))
          return le_app(f, x);
        return le_is_bot(x) ? f : x;
      }
      case ExprTag::TLam: {
        LExprP body = run(tm->kids[0]);
        if (le_is_bot(body) && excludes(m->kind, p_)) return le_bot();
        if (!k_is_procish(m->kind)) return le_tlam(m->name, body);
        LExprP mine = excludes(m->kind, p_) ? le_bot() : instantiated(tm);
        return le_tlam(m->name, le_ami(lt_var(m->name), mine, body));
      }
      case ExprTag::TApp: {
        LExprP f = run(tm->kids[0]);
        LTypeP t = type(c, normalize(m->ty));
        if (le_is_bot(f) && lt_is_bot(t)) return le_bot();
        if (lt_is_bot(t) && excludes(tm->type_kind, p_)) return f;
        if (le_is_bot(f)) return le_bot();
        return le_tapp(f, t);
      }
      case ExprTag::Inl:
      case ExprTag::Inr: {
        LExprP x = run(tm->kids[0]);
        if (le_is_bot(x) && excludes(tm->type_kind, p_)) return le_bot();
        if (lt_is_bot(type(c, tm->type))) return x;
        LTypeP other = type(c, normalize(m->ty));
        return m->tag == ExprTag::Inl ? le_inl(other, x) : le_inr(other, x);
      }
      case ExprTag::Case: {
        LExprP s = run(tm->kids[0]);
        LExprP l = run(tm->kids[1]), r = run(tm->kids[2]);
        if (roles(tm->kids[0]->type, c.universe).count(p_)) return le_case(s, m->name, l, m->name2, r);
        if (le_is_bot(s) && le_is_bot(l) && le_is_bot(r)) return le_bot();
        if (le_is_bot(l) && le_is_bot(r)) return s;
        auto merged = merge(l, r);
        if (!merged)
          throw ProjectionError("MergeFailure",
                                "branches cannot be merged at " + p_ + ": " + print(l) + " vs " + print(r), m.get());
        if (le_is_bot(s)) return *merged;
        std::set<std::string> avoid;
        all_names(*merged, avoid);
        std::string z;
        do z = "$z" + std::to_string(fresh_++);
        while (avoid.count(z));
        return le_app(le_lam(z, lt_bot(), *merged), s);
      }
      case ExprTag::Pair: {
        LExprP a = run(tm->kids[0]), b = run(tm->kids[1]);
        if (le_is_bot(a) && le_is_bot(b)) return le_bot();
        return le_pair(a, b);
      }
      case ExprTag::Fst:
      case ExprTag::Snd: {
        LExprP x = run(tm->kids[0]);
        if (le_is_bot(x)) return le_bot();
        if (lt_is_bot(type(c, tm->kids[0]->type))) return x;
        return m->tag == ExprTag::Fst ? le_fst(x) : le_snd(x);
      }
      case ExprTag::Select: {
        LExprP body = run(tm->kids[0]);
        TypeP q1 = normalize(m->src), q2 = normalize(m->dst);
        bool at1 = is(q1, p_), at2 = is(q2, p_);
        if (at1 && !at2) return le_choose(type(c, q2), m->name, body);
        if (at2 && !at1) return le_offer(type(c, q1), {{m->name, body}});
        return body;
      }
      case ExprTag::Com: {
        TypeP q1 = normalize(m->src), q2 = normalize(m->dst);
        bool at1 = is(q1, p_), at2 = is(q2, p_);
        if (at1 && at2) return le_lam("x", type(c, normalize(t_app(m->ty, q1))), le_var("x"));
        if (at1) return le_send(type(c, q2));
        if (at2) return le_recv(type(c, q1));
        if (!lt_is_bot(type(c, normalize(t_app(m->ty, q1)))) || !lt_is_bot(type(c, normalize(t_app(m->ty, q2)))))
          return le_sub(type(c, q1), type(c, q2));
        return le_bot();
      }
    }
    throw ProjectionError("Unprojectable", "unknown term form", m.get());
  }

 private:
  // p cannot take part in a term that never names it, whose type does not
  // involve it and whose free variables do not carry anything of p's. Without
  // this, calls such as f[q] x leave code at p that only reduces to bottom.
  bool uninvolved(const TypedP& tm) const {
    const Ctx& c = *tm->ctx;
    ProcSet u = c.universe;
    u.insert(p_);  // the stand-in process for definitions is not declared
    if (roles(normalize(tm->type), u).count(p_)) return false;
    if (proc_literals(tm->expr, u).count(p_)) return false;
    for (auto& x : free_vars(tm->expr)) {
      const CtxEntry* e = c.lookup_term(x);
      if (!e || roles(normalize(e->type), u).count(p_)) return false;
    }
    return true;
  }

  static bool is(const TypeP& t, const std::string& p) { return t->tag == TypeTag::Proc && t->name == p; }

  LTypeP type(const Ctx& c, const TypeP& t) { return TypeProjector{p_}.run(relaxed(c), t); }

  // Projection of the body with X := p, retyped in the abstraction's context.
  LExprP instantiated(const TypedP& tm) {
    const ExprP& m = tm->expr;
    Ctx c = with_process(*tm->ctx, p_);
    TypedP typed;
    try {
      typed = type_of(c, subst_type_in_expr(m->a, m->name, t_proc(p_)));
    } catch (const TypeError& e) {
      throw ProjectionError("Unprojectable",
                            "instantiating " + m->name + " with " + p_ + " is ill-typed: " + e.what(), m.get());
    }
    LExprP mine = run(typed);
    // Inside the branch the executing process is the one bound to X, so refer to
    // it through X. Instantiation restores p, and definitions projected at the
    // stand-in process come out identical to literal copies projected at p.
    std::set<std::string> avoid;
    all_names(mine, avoid);
    std::string tmp = fresh_name("$self", avoid);
    return lsubst_type_in_expr(lreplace_proc(mine, p_, lt_var(tmp)), tmp, lt_var(m->name));
  }

  std::string p_;
  int fresh_ = 0;
};

}  // namespace

// Projects the normal form: the clauses collapse to bottom before beta, so
// projecting a redex directly can disagree with projecting its reduct.
LTypeP project_type(const Ctx& c, const TypeP& t, const std::string& p) {
  return TypeProjector{p}.run(relaxed(c), normalize(t));
}

LExprP project_expr(const TypedP& m, const std::string& p) { return Projector(p).run(m); }

LDefs project_defs(const CheckedUnit& u) {
  LDefs out;
  for (auto& [name, typed] : u.defs) {
    try {
      out[name] = project_expr(typed, kDefProcess);
    } catch (const ProjectionError& e) {
      throw ProjectionError(e.code, "in definition '" + name + "': " + e.what(), e.node);
    }
  }
  return out;
}

ProcSet network_domain(const TypedP& main) {
  const ProcSet& u = main->ctx->universe;
  return set_union(set_inter(roles(main->type, u), u), proc_literals(main->expr, u));
}

Network project_network(const TypedP& main) {
  Network n;
  for (auto& p : network_domain(main)) n[p] = project_expr(main, p);
  return n;
}

}  // namespace polychor
