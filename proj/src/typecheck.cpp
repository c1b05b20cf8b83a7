#include "polychor/typecheck.hpp"

namespace polychor {

// ---------------------------------------------------------------- contexts

const CtxEntry* Ctx::lookup_term(const std::string& x) const {
  for (auto it = gamma.rbegin(); it != gamma.rend(); ++it)
    if ((it->tag == EntryTag::Var || it->tag == EntryTag::Fun) && it->name == x) return &*it;
  return nullptr;
}

const CtxEntry* Ctx::lookup_type(const std::string& x) const {
  for (auto it = gamma.rbegin(); it != gamma.rend(); ++it)
    if ((it->tag == EntryTag::TyVar || it->tag == EntryTag::Proc) && it->name == x) return &*it;
  return nullptr;
}

TypeP Ctx::ident_type(const std::string& x) const {
  const CtxEntry* e = lookup_type(x);
  if (e && e->tag == EntryTag::TyVar) return t_var(x);
  return universe.count(x) ? t_proc(x) : t_var(x);
}

Ctx initial_ctx(const ProcSet& universe, const Defs& defs, bool full_theta) {
  Ctx c;
  c.universe = universe;
  if (full_theta) c.theta = universe;
  for (auto& p : universe) c.gamma.push_back({EntryTag::Proc, p, nullptr, k_proc()});
  for (auto& [name, d] : defs) c.gamma.push_back({EntryTag::Fun, name, d.sig, nullptr});
  return c;
}

static KindP kind_minus(const KindP& k, const std::string& v) {
  switch (k->tag) {
    case KindTag::Star:
    case KindTag::Proc: return k;
    case KindTag::Arrow: return k_arrow(kind_minus(k->a, v), kind_minus(k->b, v));
    case KindTag::Without: {
      ProcSet ex = k->ex;
      ex.erase(v);
      return k_without(kind_minus(k->a, v), ex);
    }
  }
  return k;
}

Ctx ctx_plus(const Ctx& c, const std::string& v) {
  Ctx r = c;
  for (auto& e : r.gamma)
    if (e.kind) e.kind = kind_minus(e.kind, v);
  return r;
}

Ctx ctx_restrict_sym(const Ctx& c, const ProcSet& rho, const std::string& x) {
  Ctx r = c;
  for (auto& e : r.gamma)
    if (e.kind && rho.count(e.name)) e.kind = k_without(e.kind, {x});
  return r;
}

Ctx ctx_bind_tyvar(const Ctx& c, const std::string& x, const KindP& k) {
  Ctx r = ctx_plus(c, x);
  if (k_is_without(k)) r = ctx_restrict_sym(r, k->ex, x);
  r.gamma.push_back({EntryTag::TyVar, x, nullptr, k});
  if (k_is_procish(k)) r.theta.insert(x);
  else r.theta.erase(x);
  return r;
}

Ctx ctx_bind_var(const Ctx& c, const std::string& x, const TypeP& t) {
  Ctx r = c;
  r.gamma.push_back({EntryTag::Var, x, t, nullptr});
  return r;
}

// ---------------------------------------------------------------- kinds

bool subkind(const KindP& a, const KindP& b) {
  if (!set_subset(k_excluded(b), k_excluded(a))) return false;
  KindP ba = k_base(a), bb = k_base(b);
  if (ba->tag != bb->tag) return false;
  if (ba->tag == KindTag::Arrow) return subkind(ba->a, bb->a) && subkind(ba->b, bb->b);
  return true;
}

namespace {

[[noreturn]] void fail(const std::string& code, const std::string& msg) { throw TypeError(code, msg); }

void check_kind_wf(const Ctx& c, const KindP& k) {
  if (!k) return;
  for (auto& x : k->ex)
    if (!c.lookup_type(x)) fail("UnboundTypeVar", "unknown name '" + x + "' in kind " + print(k));
  check_kind_wf(c, k->a);
  check_kind_wf(c, k->b);
}

KindP synth(const Ctx& c, const TypeP& t, bool maximal);

bool check(const Ctx& c, const TypeP& t, const KindP& k) {
  if (subkind(synth(c, t, true), k)) return true;
  // Karr: (K1\r => K2\r) yields (K1 => K2)\r.
  if (k_is_without(k) && k->a->tag == KindTag::Arrow)
    return check(c, t, k_arrow(k_without(k->a->a, k->ex), k_without(k->a->b, k->ex)));
  return false;
}

KindP require_star(const Ctx& c, const TypeP& t, bool maximal) {
  KindP k = synth(c, t, maximal);
  if (k_base(k)->tag != KindTag::Star)
    fail("KindMismatch", "expected a type of kind *, got " + print(t) + " :: " + print(k));
  return k;
}

KindP synth(const Ctx& c, const TypeP& t, bool maximal) {
  switch (t->tag) {
    case TypeTag::Var: {
      const CtxEntry* e = c.lookup_type(t->name);
      if (!e) fail("UnboundTypeVar", "unbound type variable '" + t->name + "'");
      if (c.enforce_theta && k_is_procish(e->kind) && !c.theta.count(t->name))
        fail("ProcessEscape", "process variable '" + t->name + "' is not available here");
      return e->kind;
    }
    case TypeTag::Proc: {
      const CtxEntry* e = c.lookup_type(t->name);
      if (!e || e->tag != EntryTag::Proc) fail("UnboundTypeVar", "undeclared process '" + t->name + "'");
      if (!k_is_procish(e->kind)) fail("NotAProcess", "'" + t->name + "' is not a process");
      if (c.enforce_theta && !c.theta.count(t->name))
        fail("ProcessEscape", "process '" + t->name + "' is not available here");
      ProcSet ex = k_excluded(e->kind);
      if (ex.count(t->name)) fail("KindMismatch", "process '" + t->name + "' excludes itself");
      if (maximal) {
        ex = set_union(ex, c.universe);
        ex.erase(t->name);
      }
      return k_without(k_proc(), ex);
    }
    case TypeTag::Unit:
    case TypeTag::Int:
    case TypeTag::Str: {
      KindP kl = synth(c, t->a, maximal);
      if (!k_is_procish(kl)) fail("NotAProcess", "location " + print(t->a) + " is not a process");
      return k_without(k_star(), k_excluded(kl));
    }
    case TypeTag::Arrow: {
      KindP k1 = require_star(c, t->a, maximal), k2 = require_star(c, t->b, maximal);
      ProcSet ex = set_inter(k_excluded(k1), k_excluded(k2));
      for (auto& v : t->rho) {
        KindP kv = synth(c, c.ident_type(v), maximal);
        if (!k_is_procish(kv)) fail("NotAProcess", "'" + v + "' in an arrow annotation is not a process");
        ex = set_inter(ex, k_excluded(kv));
      }
      return k_without(k_star(), ex);
    }
    case TypeTag::Sum:
    case TypeTag::Prod: {
      KindP k1 = require_star(c, t->a, maximal), k2 = require_star(c, t->b, maximal);
      return k_without(k_star(), set_inter(k_excluded(k1), k_excluded(k2)));
    }
    case TypeTag::Forall: {
      check_kind_wf(c, t->kind);
      Ctx inner = ctx_bind_tyvar(c, t->name, t->kind);
      KindP kb = kind_minus(require_star(inner, t->a, maximal), t->name);
      // roles of a forall covers every process its binder may range over, so
      // those cannot stay excluded.
      ProcSet keep = k_is_without(t->kind) ? t->kind->ex : ProcSet{};
      ProcSet ex;
      for (auto& n : k_excluded(kb))
        if (!c.universe.count(n) || keep.count(n)) ex.insert(n);
      return k_without(k_star(), ex);
    }
    case TypeTag::TLam: {
      check_kind_wf(c, t->kind);
      Ctx inner = ctx_bind_tyvar(c, t->name, t->kind);
      KindP kb = synth(inner, t->a, maximal);
      return k_arrow(t->kind, kind_minus(kb, t->name));
    }
    case TypeTag::App: {
      KindP kf = k_base(synth(c, t->a, maximal));
      if (kf->tag != KindTag::Arrow) fail("KindMismatch", "type " + print(t->a) + " is not a type operator");
      if (!check(c, t->b, kf->a))
        fail("KindMismatch", "argument " + print(t->b) + " does not have kind " + print(kf->a));
      return kf->b;
    }
  }
  fail("IllKinded", "unknown type form");
}

}  // namespace

KindP kind_of(const Ctx& c, const TypeP& t) { return synth(c, t, false); }
KindP kind_of_max(const Ctx& c, const TypeP& t) { return synth(c, t, true); }
bool has_kind(const Ctx& c, const TypeP& t, const KindP& k) { return check(c, t, k); }

// ---------------------------------------------------------------- normalization

namespace {

struct Normalizer {
  long fuel = 200000;
  TypeP run(const TypeP& t) {
    if (!t) return t;
    switch (t->tag) {
      case TypeTag::Var:
      case TypeTag::Proc: return t;
      case TypeTag::Unit: return rebuild(t, run(t->a), nullptr, t_unit);
      case TypeTag::Int: return rebuild(t, run(t->a), nullptr, t_int);
      case TypeTag::Str: return rebuild(t, run(t->a), nullptr, t_str);
      case TypeTag::App: {
        TypeP f = run(t->a), x = run(t->b);
        if (f->tag == TypeTag::TLam) {
          if (--fuel < 0) throw TypeError("IllKinded", "type normalization does not terminate");
          return run(subst_type(f->a, f->name, x));
        }
        if (f == t->a && x == t->b) return t;
        return t_app(f, x);
      }
      case TypeTag::Arrow: {
        TypeP a = run(t->a), b = run(t->b);
        if (a == t->a && b == t->b) return t;
        return t_arrow(a, t->rho, b);
      }
      case TypeTag::Sum: {
        TypeP a = run(t->a), b = run(t->b);
        return a == t->a && b == t->b ? t : t_sum(a, b);
      }
      case TypeTag::Prod: {
        TypeP a = run(t->a), b = run(t->b);
        return a == t->a && b == t->b ? t : t_prod(a, b);
      }
      case TypeTag::Forall: {
        TypeP b = run(t->a);
        return b == t->a ? t : t_forall(t->name, t->kind, b);
      }
      case TypeTag::TLam: {
        TypeP b = run(t->a);
        return b == t->a ? t : t_tlam(t->name, t->kind, b);
      }
    }
    return t;
  }
  static TypeP rebuild(const TypeP& t, const TypeP& a, const TypeP&, TypeP (*mk)(TypeP)) {
    return a == t->a ? t : mk(a);
  }
};

}  // namespace

TypeP normalize(const TypeP& t) { return Normalizer{}.run(t); }

TypeP normalize_type(const Ctx& c, const TypeP& t) {
  synth(c, t, true);
  return normalize(t);
}

bool type_equiv(const Ctx& c, const TypeP& a, const TypeP& b) {
  return alpha_eq(normalize_type(c, a), normalize_type(c, b));
}

// ---------------------------------------------------------------- typing

namespace {

class Checker {
 public:
  TypedP run(const CtxP& c, const ExprP& m) {
    try {
      return node(c, m);
    } catch (TypeError& e) {
      if (!e.node) e.node = m.get();
      throw;
    }
  }

 private:
  static std::shared_ptr<TypedExpr> make(const ExprP& m, TypeP ty, const CtxP& c) {
    auto t = std::make_shared<TypedExpr>();
    t->expr = m;
    t->type = std::move(ty);
    t->ctx = c;
    return t;
  }

  static CtxP share(Ctx c) { return std::make_shared<const Ctx>(std::move(c)); }

  void require_kind(const Ctx& c, const TypeP& t, const KindP& k, const std::string& code, const std::string& what) {
    if (!check(c, t, k)) fail(code, what + ": " + print(t) + " does not have kind " + print(k));
  }

  TypedP node(const CtxP& cp, const ExprP& m) {
    const Ctx& c = *cp;
    switch (m->tag) {
      case ExprTag::Var: {
        const CtxEntry* e = c.lookup_term(m->name);
        if (!e || e->tag != EntryTag::Var) fail("UnboundVar", "unbound variable '" + m->name + "'");
        return make(m, normalize(e->type), cp);
      }
      case ExprTag::Fun: {
        const CtxEntry* e = c.lookup_term(m->name);
        if (!e || e->tag != EntryTag::Fun) fail("UnboundVar", "unknown function '" + m->name + "'");
        return make(m, normalize(e->type), cp);
      }
      case ExprTag::Unit:
      case ExprTag::Int:
      case ExprTag::Str: {
        if (!is_type_value(m->ty)) fail("NotAProcess", "location must be a type value");
        require_kind(c, m->ty, k_proc(), "NotAProcess", "location");
        TypeP loc = normalize(m->ty);
        TypeP ty = m->tag == ExprTag::Unit ? t_unit(loc) : m->tag == ExprTag::Int ? t_int(loc) : t_str(loc);
        return make(m, ty, cp);
      }
      case ExprTag::Lam: return lam(cp, m);
      case ExprTag::TLam: {
        check_kind_wf(c, m->kind);
        ExprP mm = m;
        // Avoid capturing an outer X mentioned by term variables in scope.
        std::set<std::string> clash;
        for (auto& e : c.gamma)
          if (e.type) {
            auto f = ftv(e.type, c.universe);
            clash.insert(f.begin(), f.end());
          }
        if (clash.count(m->name)) {
          std::set<std::string> avoid = clash;
          all_names(m, avoid);
          for (auto& e : c.gamma) avoid.insert(e.name);
          std::string x2 = fresh_name(m->name, avoid);
          mm = e_tlam(x2, m->kind, subst_type_in_expr(m->a, m->name, t_var(x2)));
        }
        CtxP inner = share(ctx_bind_tyvar(c, mm->name, mm->kind));
        TypedP body = run(inner, mm->a);
        auto t = make(mm, t_forall(mm->name, mm->kind, body->type), cp);
        t->kids = {body};
        return t;
      }
      case ExprTag::App: {
        TypedP f = run(cp, m->a);
        TypedP x = run(cp, m->b);
        if (f->type->tag != TypeTag::Arrow)
          fail("NotAFunction", "applying a term of type " + print(f->type));
        if (!alpha_eq(f->type->a, x->type))
          fail("TypeMismatch", "argument has type " + print(x->type) + " but " + print(f->type->a) + " was expected");
        auto t = make(m, f->type->b, cp);
        t->kids = {f, x};
        return t;
      }
      case ExprTag::TApp: {
        TypedP f = run(cp, m->a);
        if (f->type->tag != TypeTag::Forall)
          fail("NotAFunction", "type application of a term of type " + print(f->type));
        require_kind(c, m->ty, f->type->kind, "KindMismatch", "type argument");
        TypeP arg = normalize(m->ty);
        auto t = make(m, normalize(subst_type(f->type->a, f->type->name, arg)), cp);
        t->kids = {f};
        t->type_kind = kind_of(c, m->ty);
        return t;
      }
      case ExprTag::Inl:
      case ExprTag::Inr: {
        TypedP x = run(cp, m->a);
        require_kind(c, m->ty, k_star(), "KindMismatch", "sum annotation");
        TypeP other = normalize(m->ty);
        auto t = make(m, m->tag == ExprTag::Inl ? t_sum(x->type, other) : t_sum(other, x->type), cp);
        t->kids = {x};
        t->type_kind = kind_of(c, m->ty);
        return t;
      }
      case ExprTag::Case: {
        TypedP s = run(cp, m->a);
        if (s->type->tag != TypeTag::Sum) fail("TypeMismatch", "case on a term of type " + print(s->type));
        TypedP l = run(share(ctx_bind_var(c, m->name, s->type->a)), m->b);
        TypedP r = run(share(ctx_bind_var(c, m->name2, s->type->b)), m->c);
        if (!alpha_eq(l->type, r->type))
          fail("TypeMismatch", "case branches have types " + print(l->type) + " and " + print(r->type));
        auto t = make(m, l->type, cp);
        t->kids = {s, l, r};
        return t;
      }
      case ExprTag::Pair: {
        TypedP a = run(cp, m->a), b = run(cp, m->b);
        auto t = make(m, t_prod(a->type, b->type), cp);
        t->kids = {a, b};
        return t;
      }
      case ExprTag::Fst:
      case ExprTag::Snd: {
        TypedP a = run(cp, m->a);
        if (a->type->tag != TypeTag::Prod) fail("TypeMismatch", "projection from a term of type " + print(a->type));
        auto t = make(m, m->tag == ExprTag::Fst ? a->type->a : a->type->b, cp);
        t->kids = {a};
        return t;
      }
      case ExprTag::Com: {
        require_kind(c, m->ty, k_arrow(k_proc(), k_star()), "KindMismatch", "com transformer");
        for (auto* end : {&m->src, &m->dst}) {
          if (!is_type_value(*end)) fail("NotAProcess", "com endpoint must be a type value");
          require_kind(c, *end, k_proc(), "NotAProcess", "com endpoint");
        }
        ProcSet banned = set_union(mn(m->ty, c.universe), ftv(m->ty, c.universe));
        for (auto* end : {&m->src, &m->dst})
          require_kind(c, *end, k_without(k_proc(), banned), "ComMentionsEndpoint", "com endpoint");
        TypeP from = normalize(t_app(m->ty, m->src)), to = normalize(t_app(m->ty, m->dst));
        auto t = make(m, t_arrow(from, {}, to), cp);
        t->type_kind = kind_of(c, m->ty);
        return t;
      }
      case ExprTag::Select: {
        for (auto* end : {&m->src, &m->dst}) {
          if (!is_type_value(*end)) fail("SelectEndpointNotProc", "select endpoint must be a type value");
          if (!check(c, *end, k_proc()))
            fail("SelectEndpointNotProc", "select endpoint " + print(*end) + " is not a process");
        }
        TypedP body = run(cp, m->a);
        auto t = make(m, body->type, cp);
        t->kids = {body};
        return t;
      }
    }
    fail("TypeMismatch", "unknown term form");
  }

  TypedP lam(const CtxP& cp, const ExprP& m) {
    const Ctx& c = *cp;
    require_kind(c, m->ty, k_star(), "KindMismatch", "parameter annotation");
    ProcSet rho = m->rho_auto ? c.theta : m->rho;
    for (auto& v : rho)
      require_kind(c, c.ident_type(v), k_proc(), "NotAProcess", "arrow annotation");
    TypeP t1 = normalize(m->ty);
    TypeP t2;
    if (c.enforce_theta) {
      Ctx probe = ctx_bind_var(c, m->name, t1);
      probe.enforce_theta = false;
      t2 = run(share(std::move(probe)), m->a)->type;
    }
    Ctx inner = ctx_bind_var(c, m->name, t1);
    if (c.enforce_theta) {
      ProcSet keep = rho;
      for (auto& s : {roles(t1, c.universe), roles(t2, c.universe), ftv(t1, c.universe), ftv(t2, c.universe)})
        keep.insert(s.begin(), s.end());
      inner.theta = set_inter(c.theta, keep);
    }
    TypedP body = run(share(std::move(inner)), m->a);
    auto t = make(m, t_arrow(t1, rho, body->type), cp);
    t->kids = {body};
    t->type_kind = kind_of(c, m->ty);
    return t;
  }
};

}  // namespace

TypedP type_of(const Ctx& c, const ExprP& m) {
  return Checker{}.run(std::make_shared<const Ctx>(c), m);
}

std::map<std::string, TypedP> check_defs(const SourceUnit& u) {
  Ctx c = initial_ctx(u.universe, u.defs, false);
  std::map<std::string, TypedP> out;
  for (auto& [name, d] : u.defs) {
    TypeP sig;
    try {
      if (!has_kind(c, d.sig, k_star()))
        throw TypeError("KindMismatch", "signature of '" + name + "' does not have kind *");
      sig = normalize(d.sig);
    } catch (TypeError& e) {
      if (!e.node) e.node = d.body.get();
      throw TypeError(e.code, std::string("in definition '") + name + "': " + e.what(), e.node);
    }
    TypedP body;
    try {
      body = type_of(c, d.body);
    } catch (TypeError& e) {
      throw TypeError(e.code, std::string("in definition '") + name + "': " + e.what(), e.node);
    }
    if (!alpha_eq(body->type, sig))
      throw TypeError("TypeMismatch",
                      "definition '" + name + "' has type " + print(body->type) + ", declared " + print(sig),
                      d.body.get());
    out[name] = body;
  }
  return out;
}

CheckedUnit check_unit(const SourceUnit& u) {
  CheckedUnit r;
  r.unit = u;
  r.def_ctx = initial_ctx(u.universe, u.defs, false);
  r.main_ctx = initial_ctx(u.universe, u.defs, true);
  r.defs = check_defs(u);
  r.main = type_of(r.main_ctx, u.main);
  return r;
}

}  // namespace polychor
