#include "polychor/core.hpp"

#include <algorithm>
#include <functional>

namespace polychor {

ProcSet set_union(const ProcSet& a, const ProcSet& b) {
  ProcSet r = a;
  r.insert(b.begin(), b.end());
  return r;
}

ProcSet set_inter(const ProcSet& a, const ProcSet& b) {
  ProcSet r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
  return r;
}

ProcSet set_minus(const ProcSet& a, const ProcSet& b) {
  ProcSet r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
  return r;
}

bool set_subset(const ProcSet& a, const ProcSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// ---------------------------------------------------------------- kinds

KindP k_star() {
  static const KindP k = std::make_shared<Kind>(Kind{KindTag::Star, nullptr, nullptr, {}});
  return k;
}

KindP k_proc() {
  static const KindP k = std::make_shared<Kind>(Kind{KindTag::Proc, nullptr, nullptr, {}});
  return k;
}

KindP k_arrow(KindP a, KindP b) {
  return std::make_shared<Kind>(Kind{KindTag::Arrow, std::move(a), std::move(b), {}});
}

KindP k_without(KindP base, ProcSet ex) {
  if (base->tag == KindTag::Without) {
    ex.insert(base->ex.begin(), base->ex.end());
    base = base->a;
  }
  if (ex.empty()) return base;
  return std::make_shared<Kind>(Kind{KindTag::Without, std::move(base), nullptr, std::move(ex)});
}

KindP k_base(const KindP& k) { return k->tag == KindTag::Without ? k->a : k; }

const ProcSet& k_excluded(const KindP& k) {
  static const ProcSet empty;
  return k->tag == KindTag::Without ? k->ex : empty;
}

bool k_is_without(const KindP& k) { return k->tag == KindTag::Without; }

bool k_is_procish(const KindP& k) { return k_base(k)->tag == KindTag::Proc; }

bool kind_equal(const KindP& a, const KindP& b) {
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case KindTag::Star:
    case KindTag::Proc: return true;
    case KindTag::Arrow: return kind_equal(a->a, b->a) && kind_equal(a->b, b->b);
    case KindTag::Without: return a->ex == b->ex && kind_equal(a->a, b->a);
  }
  return false;
}

// ---------------------------------------------------------------- types

static TypeP mk(TypeTag tag, std::string name, TypeP a, TypeP b, ProcSet rho, KindP k) {
  return std::make_shared<Type>(Type{tag, std::move(name), std::move(a), std::move(b), std::move(rho), std::move(k)});
}

TypeP t_var(std::string x) { return mk(TypeTag::Var, std::move(x), nullptr, nullptr, {}, nullptr); }
TypeP t_proc(std::string p) { return mk(TypeTag::Proc, std::move(p), nullptr, nullptr, {}, nullptr); }
TypeP t_app(TypeP f, TypeP x) { return mk(TypeTag::App, "", std::move(f), std::move(x), {}, nullptr); }
TypeP t_arrow(TypeP a, ProcSet rho, TypeP b) {
  return mk(TypeTag::Arrow, "", std::move(a), std::move(b), std::move(rho), nullptr);
}
TypeP t_sum(TypeP a, TypeP b) { return mk(TypeTag::Sum, "", std::move(a), std::move(b), {}, nullptr); }
TypeP t_prod(TypeP a, TypeP b) { return mk(TypeTag::Prod, "", std::move(a), std::move(b), {}, nullptr); }
TypeP t_forall(std::string x, KindP k, TypeP body) {
  return mk(TypeTag::Forall, std::move(x), std::move(body), nullptr, {}, std::move(k));
}
TypeP t_tlam(std::string x, KindP k, TypeP body) {
  return mk(TypeTag::TLam, std::move(x), std::move(body), nullptr, {}, std::move(k));
}
TypeP t_unit(TypeP loc) { return mk(TypeTag::Unit, "", std::move(loc), nullptr, {}, nullptr); }
TypeP t_int(TypeP loc) { return mk(TypeTag::Int, "", std::move(loc), nullptr, {}, nullptr); }
TypeP t_str(TypeP loc) { return mk(TypeTag::Str, "", std::move(loc), nullptr, {}, nullptr); }
TypeP t_bool(TypeP loc) { return t_sum(t_unit(loc), t_unit(loc)); }

bool is_type_value(const TypeP& t) {
  if (!t) return true;
  if (t->tag == TypeTag::App) return false;
  return is_type_value(t->a) && is_type_value(t->b);
}

// ---------------------------------------------------------------- exprs

static std::shared_ptr<Expr> mke(ExprTag tag) {
  auto e = std::make_shared<Expr>();
  e->tag = tag;
  return e;
}

ExprP e_var(std::string x) { auto e = mke(ExprTag::Var); e->name = std::move(x); return e; }
ExprP e_fun(std::string f) { auto e = mke(ExprTag::Fun); e->name = std::move(f); return e; }
ExprP e_unit(TypeP loc) { auto e = mke(ExprTag::Unit); e->ty = std::move(loc); return e; }
ExprP e_int(std::int64_t n, TypeP loc) { auto e = mke(ExprTag::Int); e->n = n; e->ty = std::move(loc); return e; }
ExprP e_str(std::string s, TypeP loc) { auto e = mke(ExprTag::Str); e->str = std::move(s); e->ty = std::move(loc); return e; }

ExprP e_lam(std::string x, TypeP ann, ProcSet rho, ExprP body, bool rho_auto) {
  auto e = mke(ExprTag::Lam);
  e->name = std::move(x);
  e->ty = std::move(ann);
  e->rho = std::move(rho);
  e->rho_auto = rho_auto;
  e->a = std::move(body);
  return e;
}

ExprP e_tlam(std::string x, KindP k, ExprP body) {
  auto e = mke(ExprTag::TLam);
  e->name = std::move(x);
  e->kind = std::move(k);
  e->a = std::move(body);
  return e;
}

ExprP e_app(ExprP f, ExprP x) { auto e = mke(ExprTag::App); e->a = std::move(f); e->b = std::move(x); return e; }
ExprP e_tapp(ExprP f, TypeP t) { auto e = mke(ExprTag::TApp); e->a = std::move(f); e->ty = std::move(t); return e; }
ExprP e_inl(TypeP other, ExprP m) { auto e = mke(ExprTag::Inl); e->ty = std::move(other); e->a = std::move(m); return e; }
ExprP e_inr(TypeP other, ExprP m) { auto e = mke(ExprTag::Inr); e->ty = std::move(other); e->a = std::move(m); return e; }

ExprP e_case(ExprP m, std::string x, ExprP l, std::string y, ExprP r) {
  auto e = mke(ExprTag::Case);
  e->a = std::move(m);
  e->name = std::move(x);
  e->b = std::move(l);
  e->name2 = std::move(y);
  e->c = std::move(r);
  return e;
}

ExprP e_pair(ExprP a, ExprP b) { auto e = mke(ExprTag::Pair); e->a = std::move(a); e->b = std::move(b); return e; }
ExprP e_fst(ExprP m) { auto e = mke(ExprTag::Fst); e->a = std::move(m); return e; }
ExprP e_snd(ExprP m) { auto e = mke(ExprTag::Snd); e->a = std::move(m); return e; }

ExprP e_com(TypeP transformer, TypeP src, TypeP dst) {
  auto e = mke(ExprTag::Com);
  e->ty = std::move(transformer);
  e->src = std::move(src);
  e->dst = std::move(dst);
  return e;
}

ExprP e_select(TypeP src, TypeP dst, std::string label, ExprP m) {
  auto e = mke(ExprTag::Select);
  e->src = std::move(src);
  e->dst = std::move(dst);
  e->name = std::move(label);
  e->a = std::move(m);
  return e;
}

bool is_value(const ExprP& m) {
  switch (m->tag) {
    case ExprTag::Var:
    case ExprTag::Unit:
    case ExprTag::Int:
    case ExprTag::Str:
    case ExprTag::Lam:
    case ExprTag::TLam:
    case ExprTag::Com: return true;
    case ExprTag::Inl:
    case ExprTag::Inr: return is_value(m->a);
    case ExprTag::Pair: return is_value(m->a) && is_value(m->b);
    default: return false;
  }
}

// ---------------------------------------------------------------- free names

std::set<std::string> ftv_kind(const KindP& k, const ProcSet& universe) {
  std::set<std::string> out;
  std::function<void(const KindP&)> go = [&](const KindP& q) {
    if (!q) return;
    if (q->tag == KindTag::Without)
      for (auto& x : q->ex)
        if (!universe.count(x)) out.insert(x);
    go(q->a);
    go(q->b);
  };
  go(k);
  return out;
}

std::set<std::string> ftv(const TypeP& t, const ProcSet& universe) {
  std::set<std::string> out;
  if (!t) return out;
  switch (t->tag) {
    case TypeTag::Var: out.insert(t->name); break;
    case TypeTag::Proc: break;
    case TypeTag::Forall:
    case TypeTag::TLam: {
      out = ftv(t->a, universe);
      out.erase(t->name);
      auto k = ftv_kind(t->kind, universe);
      out.insert(k.begin(), k.end());
      break;
    }
    default: {
      out = ftv(t->a, universe);
      auto b = ftv(t->b, universe);
      out.insert(b.begin(), b.end());
      for (auto& x : t->rho)
        if (!universe.count(x)) out.insert(x);
    }
  }
  return out;
}

static ProcSet roles_or_mn(const TypeP& t, const ProcSet& universe, bool mentioned) {
  ProcSet out;
  if (!t) return out;
  switch (t->tag) {
    case TypeTag::Var: break;
    case TypeTag::Proc: out.insert(t->name); break;
    case TypeTag::Forall:
    case TypeTag::TLam: {
      out = roles_or_mn(t->a, universe, mentioned);
      if (k_is_without(t->kind)) {
        auto extra = mentioned ? t->kind->ex : set_minus(universe, t->kind->ex);
        out.insert(extra.begin(), extra.end());
      } else if (!mentioned) {
        out = universe;
      }
      break;
    }
    default: {
      out = roles_or_mn(t->a, universe, mentioned);
      auto b = roles_or_mn(t->b, universe, mentioned);
      out.insert(b.begin(), b.end());
      for (auto& x : t->rho)
        if (universe.count(x)) out.insert(x);
    }
  }
  return out;
}

ProcSet roles(const TypeP& t, const ProcSet& universe) { return roles_or_mn(t, universe, false); }
ProcSet mn(const TypeP& t, const ProcSet& universe) { return roles_or_mn(t, universe, true); }

void all_names(const KindP& k, std::set<std::string>& out) {
  if (!k) return;
  out.insert(k->ex.begin(), k->ex.end());
  all_names(k->a, out);
  all_names(k->b, out);
}

void all_names(const TypeP& t, std::set<std::string>& out) {
  if (!t) return;
  if (!t->name.empty()) out.insert(t->name);
  out.insert(t->rho.begin(), t->rho.end());
  all_names(t->kind, out);
  all_names(t->a, out);
  all_names(t->b, out);
}

void all_names(const ExprP& m, std::set<std::string>& out) {
  if (!m) return;
  if (!m->name.empty()) out.insert(m->name);
  if (!m->name2.empty()) out.insert(m->name2);
  out.insert(m->rho.begin(), m->rho.end());
  all_names(m->ty, out);
  all_names(m->src, out);
  all_names(m->dst, out);
  all_names(m->kind, out);
  all_names(m->a, out);
  all_names(m->b, out);
  all_names(m->c, out);
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string stem = base.substr(0, base.find('\''));
  for (int i = 1;; ++i) {
    std::string cand = stem + "'" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

// ---------------------------------------------------------------- substitution

static void rename_in_set(ProcSet& s, const std::string& x, const TypeP& v) {
  if (!s.count(x)) return;
  s.erase(x);
  if (v->tag == TypeTag::Var || v->tag == TypeTag::Proc) s.insert(v->name);
}

KindP subst_kind(const KindP& k, const std::string& x, const TypeP& v) {
  switch (k->tag) {
    case KindTag::Star:
    case KindTag::Proc: return k;
    case KindTag::Arrow: {
      auto a = subst_kind(k->a, x, v), b = subst_kind(k->b, x, v);
      if (a == k->a && b == k->b) return k;
      return k_arrow(a, b);
    }
    case KindTag::Without: {
      auto a = subst_kind(k->a, x, v);
      if (a == k->a && !k->ex.count(x)) return k;
      ProcSet ex = k->ex;
      rename_in_set(ex, x, v);
      return k_without(a, ex);
    }
  }
  return k;
}

TypeP subst_type(const TypeP& t, const std::string& x, const TypeP& v) {
  if (!t) return t;
  switch (t->tag) {
    case TypeTag::Var: return t->name == x ? v : t;
    case TypeTag::Proc: return t;
    case TypeTag::Forall:
    case TypeTag::TLam: {
      KindP k = subst_kind(t->kind, x, v);
      if (t->name == x) return k == t->kind ? t : mk(t->tag, t->name, t->a, nullptr, {}, k);
      std::string y = t->name;
      TypeP body = t->a;
      std::set<std::string> vn;
      all_names(v, vn);
      if (vn.count(y)) {
        std::set<std::string> avoid = vn;
        all_names(body, avoid);
        avoid.insert(x);
        std::string y2 = fresh_name(y, avoid);
        body = subst_type(body, y, t_var(y2));
        y = y2;
      }
      TypeP nb = subst_type(body, x, v);
      if (nb == t->a && k == t->kind && y == t->name) return t;
      return mk(t->tag, y, nb, nullptr, {}, k);
    }
    default: {
      TypeP a = subst_type(t->a, x, v), b = subst_type(t->b, x, v);
      if (a == t->a && b == t->b && !t->rho.count(x)) return t;
      ProcSet rho = t->rho;
      rename_in_set(rho, x, v);
      return mk(t->tag, t->name, a, b, rho, t->kind);
    }
  }
}

static std::shared_ptr<Expr> copy_expr(const ExprP& m) { return std::make_shared<Expr>(*m); }

std::set<std::string> free_vars(const ExprP& m) {
  std::set<std::string> out;
  std::function<void(const ExprP&, std::set<std::string>&)> go = [&](const ExprP& e,
                                                                      std::set<std::string>& bound) {
    if (!e) return;
    switch (e->tag) {
      case ExprTag::Var:
        if (!bound.count(e->name)) out.insert(e->name);
        return;
      case ExprTag::Lam: {
        bool had = bound.count(e->name);
        bound.insert(e->name);
        go(e->a, bound);
        if (!had) bound.erase(e->name);
        return;
      }
      case ExprTag::Case: {
        go(e->a, bound);
        bool had = bound.count(e->name);
        bound.insert(e->name);
        go(e->b, bound);
        if (!had) bound.erase(e->name);
        had = bound.count(e->name2);
        bound.insert(e->name2);
        go(e->c, bound);
        if (!had) bound.erase(e->name2);
        return;
      }
      default:
        go(e->a, bound);
        go(e->b, bound);
        go(e->c, bound);
    }
  };
  std::set<std::string> bound;
  go(m, bound);
  return out;
}

std::set<std::string> ftv_expr(const ExprP& m, const ProcSet& universe) {
  std::set<std::string> out;
  if (!m) return out;
  auto add = [&](const std::set<std::string>& s) { out.insert(s.begin(), s.end()); };
  if (m->ty) add(ftv(m->ty, universe));
  if (m->src) add(ftv(m->src, universe));
  if (m->dst) add(ftv(m->dst, universe));
  for (auto& x : m->rho)
    if (!universe.count(x)) out.insert(x);
  if (m->tag == ExprTag::TLam) {
    auto inner = ftv_expr(m->a, universe);
    inner.erase(m->name);
    add(inner);
    add(ftv_kind(m->kind, universe));
    return out;
  }
  add(ftv_expr(m->a, universe));
  add(ftv_expr(m->b, universe));
  add(ftv_expr(m->c, universe));
  return out;
}

static ExprP rename_var(const ExprP& body, const std::string& from, const std::string& to) {
  return subst_expr(body, from, e_var(to));
}

ExprP subst_expr(const ExprP& m, const std::string& x, const ExprP& v) {
  if (!m) return m;
  switch (m->tag) {
    case ExprTag::Var: return m->name == x ? v : m;
    case ExprTag::Unit:
    case ExprTag::Int:
    case ExprTag::Str:
    case ExprTag::Com:
    case ExprTag::Fun: return m;
    case ExprTag::Lam: {
      if (m->name == x) return m;
      auto fv = free_vars(v);
      std::string y = m->name;
      ExprP body = m->a;
      if (fv.count(y)) {
        std::set<std::string> avoid = fv;
        all_names(body, avoid);
        avoid.insert(x);
        std::string y2 = fresh_name(y, avoid);
        body = rename_var(body, y, y2);
        y = y2;
      }
      auto nb = subst_expr(body, x, v);
      if (nb == m->a && y == m->name) return m;
      auto e = copy_expr(m);
      e->name = y;
      e->a = nb;
      return e;
    }
    case ExprTag::TLam: {
      std::set<std::string> vn;
      all_names(v, vn);
      std::string y = m->name;
      ExprP body = m->a;
      if (vn.count(y)) {
        std::set<std::string> avoid = vn;
        all_names(body, avoid);
        std::string y2 = fresh_name(y, avoid);
        body = subst_type_in_expr(body, y, t_var(y2));
        y = y2;
      }
      auto nb = subst_expr(body, x, v);
      if (nb == m->a && y == m->name) return m;
      auto e = copy_expr(m);
      e->name = y;
      e->a = nb;
      return e;
    }
    case ExprTag::Case: {
      auto fv = free_vars(v);
      auto branch = [&](std::string y, ExprP body) -> std::pair<std::string, ExprP> {
        if (y == x) return {y, body};
        if (fv.count(y)) {
          std::set<std::string> avoid = fv;
          all_names(body, avoid);
          avoid.insert(x);
          std::string y2 = fresh_name(y, avoid);
          body = rename_var(body, y, y2);
          y = y2;
        }
        return {y, subst_expr(body, x, v)};
      };
      auto s = subst_expr(m->a, x, v);
      auto [l, lb] = branch(m->name, m->b);
      auto [r, rb] = branch(m->name2, m->c);
      if (s == m->a && lb == m->b && rb == m->c && l == m->name && r == m->name2) return m;
      auto e = copy_expr(m);
      e->a = s;
      e->name = l;
      e->b = lb;
      e->name2 = r;
      e->c = rb;
      return e;
    }
    default: {
      auto a = subst_expr(m->a, x, v), b = subst_expr(m->b, x, v), c = subst_expr(m->c, x, v);
      if (a == m->a && b == m->b && c == m->c) return m;
      auto e = copy_expr(m);
      e->a = a;
      e->b = b;
      e->c = c;
      return e;
    }
  }
}

ExprP subst_type_in_expr(const ExprP& m, const std::string& x, const TypeP& v) {
  if (!m) return m;
  auto e = copy_expr(m);
  bool changed = false;
  auto st = [&](TypeP& t) {
    if (!t) return;
    auto n = subst_type(t, x, v);
    if (n != t) { t = n; changed = true; }
  };
  st(e->ty);
  st(e->src);
  st(e->dst);
  if (e->rho.count(x)) { rename_in_set(e->rho, x, v); changed = true; }
  if (m->tag == ExprTag::TLam) {
    auto k = subst_kind(m->kind, x, v);
    if (k != m->kind) { e->kind = k; changed = true; }
    if (m->name == x) return changed ? ExprP(e) : m;
    std::set<std::string> vn;
    all_names(v, vn);
    ExprP body = m->a;
    if (vn.count(m->name)) {
      std::set<std::string> avoid = vn;
      all_names(body, avoid);
      avoid.insert(x);
      std::string y2 = fresh_name(m->name, avoid);
      body = subst_type_in_expr(body, m->name, t_var(y2));
      e->name = y2;
      changed = true;
    }
    auto nb = subst_type_in_expr(body, x, v);
    if (nb != m->a) { e->a = nb; changed = true; }
    return changed ? ExprP(e) : m;
  }
  auto sub = [&](ExprP& c) {
    if (!c) return;
    auto n = subst_type_in_expr(c, x, v);
    if (n != c) { c = n; changed = true; }
  };
  sub(e->a);
  sub(e->b);
  sub(e->c);
  return changed ? ExprP(e) : m;
}

KindP subst_proc(const KindP& k, const std::string& p, const std::string& q) {
  return subst_kind(k, p, t_proc(q));
}

TypeP subst_proc(const TypeP& t, const std::string& p, const std::string& q) {
  if (!t) return t;
  switch (t->tag) {
    case TypeTag::Proc: return t->name == p ? t_proc(q) : t;
    case TypeTag::Var: return t;
    case TypeTag::Forall:
    case TypeTag::TLam: {
      auto k = subst_proc(t->kind, p, q);
      auto a = subst_proc(t->a, p, q);
      if (k == t->kind && a == t->a) return t;
      return mk(t->tag, t->name, a, nullptr, {}, k);
    }
    default: {
      auto a = subst_proc(t->a, p, q), b = subst_proc(t->b, p, q);
      if (a == t->a && b == t->b && !t->rho.count(p)) return t;
      ProcSet rho = t->rho;
      if (rho.erase(p)) rho.insert(q);
      return mk(t->tag, t->name, a, b, rho, t->kind);
    }
  }
}

ExprP subst_proc(const ExprP& m, const std::string& p, const std::string& q) {
  if (!m) return m;
  auto e = copy_expr(m);
  bool changed = false;
  auto st = [&](TypeP& t) {
    if (!t) return;
    auto n = subst_proc(t, p, q);
    if (n != t) { t = n; changed = true; }
  };
  st(e->ty);
  st(e->src);
  st(e->dst);
  if (e->kind) {
    auto k = subst_proc(e->kind, p, q);
    if (k != e->kind) { e->kind = k; changed = true; }
  }
  if (e->rho.erase(p)) { e->rho.insert(q); changed = true; }
  auto sub = [&](ExprP& c) {
    if (!c) return;
    auto n = subst_proc(c, p, q);
    if (n != c) { c = n; changed = true; }
  };
  sub(e->a);
  sub(e->b);
  sub(e->c);
  return changed ? ExprP(e) : m;
}

ProcSet proc_literals(const TypeP& t, const ProcSet& universe) {
  ProcSet out;
  std::function<void(const KindP&)> gk = [&](const KindP& k) {
    if (!k) return;
    for (auto& x : k->ex)
      if (universe.count(x)) out.insert(x);
    gk(k->a);
    gk(k->b);
  };
  std::function<void(const TypeP&)> go = [&](const TypeP& u) {
    if (!u) return;
    if (u->tag == TypeTag::Proc) out.insert(u->name);
    for (auto& x : u->rho)
      if (universe.count(x)) out.insert(x);
    gk(u->kind);
    go(u->a);
    go(u->b);
  };
  go(t);
  return out;
}

ProcSet proc_literals(const ExprP& m, const ProcSet& universe) {
  ProcSet out;
  std::function<void(const ExprP&)> go = [&](const ExprP& e) {
    if (!e) return;
    for (auto* t : {&e->ty, &e->src, &e->dst}) {
      auto s = proc_literals(*t, universe);
      out.insert(s.begin(), s.end());
    }
    if (e->kind) {
      auto s = proc_literals(t_forall("_", e->kind, t_unit(t_var("_"))), universe);
      out.insert(s.begin(), s.end());
    }
    for (auto& x : e->rho)
      if (universe.count(x)) out.insert(x);
    go(e->a);
    go(e->b);
    go(e->c);
  };
  go(m);
  return out;
}

// ---------------------------------------------------------------- canonical forms

namespace {

struct Canon {
  std::vector<std::pair<std::string, std::string>> tyenv, tmenv;
  int ty_depth = 0, tm_depth = 0;

  std::string tyname(const std::string& x) const {
    for (auto it = tyenv.rbegin(); it != tyenv.rend(); ++it)
      if (it->first == x) return it->second;
    return x;
  }
  std::string tmname(const std::string& x) const {
    for (auto it = tmenv.rbegin(); it != tmenv.rend(); ++it)
      if (it->first == x) return it->second;
    return x;
  }
  std::string set(const ProcSet& s) const {
    std::set<std::string> r;
    for (auto& x : s) r.insert(tyname(x));
    std::string out = "{";
    for (auto& x : r) out += x + ",";
    return out + "}";
  }
  std::string kind(const KindP& k) const {
    switch (k->tag) {
      case KindTag::Star: return "*";
      case KindTag::Proc: return "P";
      case KindTag::Arrow: return "(" + kind(k->a) + "=>" + kind(k->b) + ")";
      case KindTag::Without: return "(" + kind(k->a) + "\\" + set(k->ex) + ")";
    }
    return "?";
  }
  std::string type(const TypeP& t) {
    switch (t->tag) {
      case TypeTag::Var: return "v:" + tyname(t->name);
      case TypeTag::Proc: return "p:" + t->name;
      case TypeTag::App: return "(" + type(t->a) + " " + type(t->b) + ")";
      case TypeTag::Arrow: return "(" + type(t->a) + "->" + set(t->rho) + type(t->b) + ")";
      case TypeTag::Sum: return "(" + type(t->a) + "+" + type(t->b) + ")";
      case TypeTag::Prod: return "(" + type(t->a) + "*" + type(t->b) + ")";
      case TypeTag::Forall:
      case TypeTag::TLam: {
        std::string k = kind(t->kind);
        std::string id = "#" + std::to_string(ty_depth++);
        tyenv.emplace_back(t->name, id);
        std::string body = type(t->a);
        tyenv.pop_back();
        --ty_depth;
        return std::string(t->tag == TypeTag::Forall ? "A" : "L") + "[" + k + "]." + body;
      }
      case TypeTag::Unit: return "U@" + type(t->a);
      case TypeTag::Int: return "I@" + type(t->a);
      case TypeTag::Str: return "S@" + type(t->a);
    }
    return "?";
  }
  std::string bind_tm(const std::string& x, const ExprP& body) {
    std::string id = "%" + std::to_string(tm_depth++);
    tmenv.emplace_back(x, id);
    std::string r = expr(body);
    tmenv.pop_back();
    --tm_depth;
    return r;
  }
  std::string expr(const ExprP& m) {
    switch (m->tag) {
      case ExprTag::Var: return tmname(m->name);
      case ExprTag::Fun: return "f:" + m->name;
      case ExprTag::Unit: return "()@" + type(m->ty);
      case ExprTag::Int: return std::to_string(m->n) + "@" + type(m->ty);
      case ExprTag::Str: return "\"" + m->str + "\"@" + type(m->ty);
      case ExprTag::Lam:
        return "\\" + type(m->ty) + set(m->rho) + (m->rho_auto ? "?" : "") + "." + bind_tm(m->name, m->a);
      case ExprTag::TLam: {
        std::string k = kind(m->kind);
        std::string id = "#" + std::to_string(ty_depth++);
        tyenv.emplace_back(m->name, id);
        std::string body = expr(m->a);
        tyenv.pop_back();
        --ty_depth;
        return "/\\" + k + "." + body;
      }
      case ExprTag::App: return "(" + expr(m->a) + " " + expr(m->b) + ")";
      case ExprTag::TApp: return "(" + expr(m->a) + " [" + type(m->ty) + "])";
      case ExprTag::Inl: return "inl[" + type(m->ty) + "](" + expr(m->a) + ")";
      case ExprTag::Inr: return "inr[" + type(m->ty) + "](" + expr(m->a) + ")";
      case ExprTag::Case:
        return "case(" + expr(m->a) + "|" + bind_tm(m->name, m->b) + "|" + bind_tm(m->name2, m->c) + ")";
      case ExprTag::Pair: return "(" + expr(m->a) + "," + expr(m->b) + ")";
      case ExprTag::Fst: return "fst(" + expr(m->a) + ")";
      case ExprTag::Snd: return "snd(" + expr(m->a) + ")";
      case ExprTag::Com: return "com[" + type(m->ty) + "](" + type(m->src) + "," + type(m->dst) + ")";
      case ExprTag::Select:
        return "sel(" + type(m->src) + "," + type(m->dst) + "," + m->name + ";" + expr(m->a) + ")";
    }
    return "?";
  }
};

}  // namespace

std::string canon(const KindP& k) { return Canon{}.kind(k); }
std::string canon(const TypeP& t) { return Canon{}.type(t); }
std::string canon(const ExprP& m) { return Canon{}.expr(m); }
bool alpha_eq(const TypeP& a, const TypeP& b) { return canon(a) == canon(b); }
bool alpha_eq(const ExprP& a, const ExprP& b) { return canon(a) == canon(b); }

std::size_t expr_size(const ExprP& m) {
  if (!m) return 0;
  return 1 + expr_size(m->a) + expr_size(m->b) + expr_size(m->c);
}

}  // namespace polychor
