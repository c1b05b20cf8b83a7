#include "polychor/local.hpp"

#include <functional>
#include <vector>

namespace polychor {

static LTypeP mkt(LTypeTag tag, std::string name = "", LTypeP a = nullptr, LTypeP b = nullptr,
                  LTypeP c = nullptr) {
  return std::make_shared<LType>(LType{tag, std::move(name), std::move(a), std::move(b), std::move(c)});
}

LTypeP lt_var(std::string x) { return mkt(LTypeTag::Var, std::move(x)); }
LTypeP lt_proc(std::string p) { return mkt(LTypeTag::Proc, std::move(p)); }
LTypeP lt_unit() { static const LTypeP t = mkt(LTypeTag::Unit); return t; }
LTypeP lt_int() { static const LTypeP t = mkt(LTypeTag::Int); return t; }
LTypeP lt_str() { static const LTypeP t = mkt(LTypeTag::Str); return t; }
LTypeP lt_bot() { static const LTypeP t = mkt(LTypeTag::Bot); return t; }
LTypeP lt_arrow(LTypeP a, LTypeP b) { return mkt(LTypeTag::Arrow, "", std::move(a), std::move(b)); }
LTypeP lt_sum(LTypeP a, LTypeP b) { return mkt(LTypeTag::Sum, "", std::move(a), std::move(b)); }
LTypeP lt_prod(LTypeP a, LTypeP b) { return mkt(LTypeTag::Prod, "", std::move(a), std::move(b)); }
LTypeP lt_forall(std::string x, LTypeP body) { return mkt(LTypeTag::Forall, std::move(x), std::move(body)); }
LTypeP lt_tlam(std::string x, LTypeP body) { return mkt(LTypeTag::TLam, std::move(x), std::move(body)); }
LTypeP lt_app(LTypeP f, LTypeP x) { return mkt(LTypeTag::App, "", std::move(f), std::move(x)); }
LTypeP lt_ami(LTypeP who, LTypeP t, LTypeP e) {
  return mkt(LTypeTag::AmI, "", std::move(who), std::move(t), std::move(e));
}
bool lt_is_bot(const LTypeP& t) { return t && t->tag == LTypeTag::Bot; }

static std::shared_ptr<LExpr> mke(LExprTag tag) {
  auto e = std::make_shared<LExpr>();
  e->tag = tag;
  return e;
}

LExprP le_var(std::string x) { auto e = mke(LExprTag::Var); e->name = std::move(x); return e; }
LExprP le_unit() { static const LExprP e = mke(LExprTag::Unit); return e; }
LExprP le_int(std::int64_t n) { auto e = mke(LExprTag::Int); e->n = n; return e; }
LExprP le_str(std::string s) { auto e = mke(LExprTag::Str); e->str = std::move(s); return e; }
LExprP le_bot() { static const LExprP e = mke(LExprTag::Bot); return e; }
LExprP le_lam(std::string x, LTypeP ann, LExprP body) {
  auto e = mke(LExprTag::Lam);
  e->name = std::move(x);
  e->ty = std::move(ann);
  e->a = std::move(body);
  return e;
}
LExprP le_tlam(std::string x, LExprP body) {
  auto e = mke(LExprTag::TLam);
  e->name = std::move(x);
  e->a = std::move(body);
  return e;
}
LExprP le_app(LExprP f, LExprP x) { auto e = mke(LExprTag::App); e->a = std::move(f); e->b = std::move(x); return e; }
LExprP le_tapp(LExprP f, LTypeP t) { auto e = mke(LExprTag::TApp); e->a = std::move(f); e->ty = std::move(t); return e; }
LExprP le_inl(LTypeP other, LExprP m) { auto e = mke(LExprTag::Inl); e->ty = std::move(other); e->a = std::move(m); return e; }
LExprP le_inr(LTypeP other, LExprP m) { auto e = mke(LExprTag::Inr); e->ty = std::move(other); e->a = std::move(m); return e; }
LExprP le_case(LExprP m, std::string x, LExprP l, std::string y, LExprP r) {
  auto e = mke(LExprTag::Case);
  e->a = std::move(m);
  e->name = std::move(x);
  e->b = std::move(l);
  e->name2 = std::move(y);
  e->c = std::move(r);
  return e;
}
LExprP le_pair(LExprP a, LExprP b) { auto e = mke(LExprTag::Pair); e->a = std::move(a); e->b = std::move(b); return e; }
LExprP le_fst(LExprP m) { auto e = mke(LExprTag::Fst); e->a = std::move(m); return e; }
LExprP le_snd(LExprP m) { auto e = mke(LExprTag::Snd); e->a = std::move(m); return e; }
LExprP le_send(LTypeP to) { auto e = mke(LExprTag::Send); e->who = std::move(to); return e; }
LExprP le_recv(LTypeP from) { auto e = mke(LExprTag::Recv); e->who = std::move(from); return e; }
LExprP le_offer(LTypeP from, std::map<std::string, LExprP> branches) {
  auto e = mke(LExprTag::Offer);
  e->who = std::move(from);
  e->branches = std::move(branches);
  return e;
}
LExprP le_choose(LTypeP to, std::string label, LExprP m) {
  auto e = mke(LExprTag::Choose);
  e->who = std::move(to);
  e->name = std::move(label);
  e->a = std::move(m);
  return e;
}
LExprP le_sub(LTypeP from, LTypeP to) {
  auto e = mke(LExprTag::Sub);
  e->who = std::move(from);
  e->who2 = std::move(to);
  return e;
}
LExprP le_fun(std::string f) { auto e = mke(LExprTag::Fun); e->name = std::move(f); return e; }
LExprP le_ami(LTypeP who, LExprP t, LExprP el) {
  auto e = mke(LExprTag::AmI);
  e->who = std::move(who);
  e->a = std::move(t);
  e->b = std::move(el);
  return e;
}
LExprP le_hole() { static const LExprP e = mke(LExprTag::Hole); return e; }

bool le_is_bot(const LExprP& m) { return m && m->tag == LExprTag::Bot; }

bool is_lvalue(const LExprP& m) {
  switch (m->tag) {
    case LExprTag::Var:
    case LExprTag::Unit:
    case LExprTag::Int:
    case LExprTag::Str:
    case LExprTag::Bot:
    case LExprTag::Lam:
    case LExprTag::TLam:
    case LExprTag::Send:
    case LExprTag::Recv:
    case LExprTag::Sub: return true;
    case LExprTag::Inl:
    case LExprTag::Inr: return is_lvalue(m->a);
    case LExprTag::Pair: return is_lvalue(m->a) && is_lvalue(m->b);
    default: return false;
  }
}

void all_names(const LTypeP& t, std::set<std::string>& out) {
  if (!t) return;
  if (!t->name.empty()) out.insert(t->name);
  all_names(t->a, out);
  all_names(t->b, out);
  all_names(t->c, out);
}

void all_names(const LExprP& m, std::set<std::string>& out) {
  if (!m) return;
  if (!m->name.empty()) out.insert(m->name);
  if (!m->name2.empty()) out.insert(m->name2);
  all_names(m->ty, out);
  all_names(m->who, out);
  all_names(m->who2, out);
  all_names(m->a, out);
  all_names(m->b, out);
  all_names(m->c, out);
  for (auto& [l, br] : m->branches) all_names(br, out);
}

// ---------------------------------------------------------------- substitution

LTypeP lsubst_type(const LTypeP& t, const std::string& x, const LTypeP& v) {
  if (!t) return t;
  switch (t->tag) {
    case LTypeTag::Var: return t->name == x ? v : t;
    case LTypeTag::Proc:
    case LTypeTag::Unit:
    case LTypeTag::Int:
    case LTypeTag::Str:
    case LTypeTag::Bot: return t;
    case LTypeTag::Forall:
    case LTypeTag::TLam: {
      if (t->name == x) return t;
      std::set<std::string> vn;
      all_names(v, vn);
      std::string y = t->name;
      LTypeP body = t->a;
      if (vn.count(y)) {
        std::set<std::string> avoid = vn;
        all_names(body, avoid);
        avoid.insert(x);
        std::string y2 = fresh_name(y, avoid);
        body = lsubst_type(body, y, lt_var(y2));
        y = y2;
      }
      auto nb = lsubst_type(body, x, v);
      if (nb == t->a && y == t->name) return t;
      return mkt(t->tag, y, nb);
    }
    default: {
      auto a = lsubst_type(t->a, x, v), b = lsubst_type(t->b, x, v), c = lsubst_type(t->c, x, v);
      if (a == t->a && b == t->b && c == t->c) return t;
      return mkt(t->tag, t->name, a, b, c);
    }
  }
}

static std::set<std::string> lfree_vars(const LExprP& m) {
  std::set<std::string> out;
  std::function<void(const LExprP&, std::multiset<std::string>&)> go = [&](const LExprP& e,
                                                                           std::multiset<std::string>& bound) {
    if (!e) return;
    auto under = [&](const std::string& x, const LExprP& body) {
      auto it = bound.insert(x);
      go(body, bound);
      bound.erase(it);
    };
    switch (e->tag) {
      case LExprTag::Var:
        if (!bound.count(e->name)) out.insert(e->name);
        return;
      case LExprTag::Lam: under(e->name, e->a); return;
      case LExprTag::Case:
        go(e->a, bound);
        under(e->name, e->b);
        under(e->name2, e->c);
        return;
      default:
        go(e->a, bound);
        go(e->b, bound);
        go(e->c, bound);
        for (auto& [l, br] : e->branches) go(br, bound);
    }
  };
  std::multiset<std::string> bound;
  go(m, bound);
  return out;
}

static std::shared_ptr<LExpr> copy(const LExprP& m) { return std::make_shared<LExpr>(*m); }

// Applies f to every direct child (terms and branch bodies); returns m if nothing changed.
template <class F>
static LExprP map_children(const LExprP& m, F&& f) {
  auto e = copy(m);
  bool changed = false;
  for (auto* c : {&e->a, &e->b, &e->c}) {
    if (!*c) continue;
    auto n = f(*c);
    if (n != *c) { *c = n; changed = true; }
  }
  for (auto& [l, br] : e->branches) {
    auto n = f(br);
    if (n != br) { br = n; changed = true; }
  }
  return changed ? LExprP(e) : m;
}

LExprP lsubst_expr(const LExprP& m, const std::string& x, const LExprP& v) {
  if (!m) return m;
  switch (m->tag) {
    case LExprTag::Var: return m->name == x ? v : m;
    case LExprTag::Lam: {
      if (m->name == x) return m;
      auto fv = lfree_vars(v);
      std::string y = m->name;
      LExprP body = m->a;
      if (fv.count(y)) {
        std::set<std::string> avoid = fv;
        all_names(body, avoid);
        avoid.insert(x);
        std::string y2 = fresh_name(y, avoid);
        body = lsubst_expr(body, y, le_var(y2));
        y = y2;
      }
      auto nb = lsubst_expr(body, x, v);
      if (nb == m->a && y == m->name) return m;
      auto e = copy(m);
      e->name = y;
      e->a = nb;
      return e;
    }
    case LExprTag::TLam: {
      std::set<std::string> vn;
      all_names(v, vn);
      std::string y = m->name;
      LExprP body = m->a;
      if (vn.count(y)) {
        std::set<std::string> avoid = vn;
        all_names(body, avoid);
        std::string y2 = fresh_name(y, avoid);
        body = lsubst_type_in_expr(body, y, lt_var(y2));
        y = y2;
      }
      auto nb = lsubst_expr(body, x, v);
      if (nb == m->a && y == m->name) return m;
      auto e = copy(m);
      e->name = y;
      e->a = nb;
      return e;
    }
    case LExprTag::Case: {
      auto fv = lfree_vars(v);
      auto branch = [&](std::string y, LExprP body) -> std::pair<std::string, LExprP> {
        if (y == x) return {y, body};
        if (fv.count(y)) {
          std::set<std::string> avoid = fv;
          all_names(body, avoid);
          avoid.insert(x);
          std::string y2 = fresh_name(y, avoid);
          body = lsubst_expr(body, y, le_var(y2));
          y = y2;
        }
        return {y, lsubst_expr(body, x, v)};
      };
      auto s = lsubst_expr(m->a, x, v);
      auto [l, lb] = branch(m->name, m->b);
      auto [r, rb] = branch(m->name2, m->c);
      if (s == m->a && lb == m->b && rb == m->c && l == m->name && r == m->name2) return m;
      auto e = copy(m);
      e->a = s;
      e->name = l;
      e->b = lb;
      e->name2 = r;
      e->c = rb;
      return e;
    }
    default: return map_children(m, [&](const LExprP& c) { return lsubst_expr(c, x, v); });
  }
}

LExprP lsubst_type_in_expr(const LExprP& m, const std::string& x, const LTypeP& v) {
  if (!m) return m;
  auto e = copy(m);
  bool changed = false;
  for (auto* t : {&e->ty, &e->who, &e->who2}) {
    if (!*t) continue;
    auto n = lsubst_type(*t, x, v);
    if (n != *t) { *t = n; changed = true; }
  }
  if (m->tag == LExprTag::TLam) {
    if (m->name == x) return changed ? LExprP(e) : m;
    std::set<std::string> vn;
    all_names(v, vn);
    LExprP body = m->a;
    if (vn.count(m->name)) {
      std::set<std::string> avoid = vn;
      all_names(body, avoid);
      avoid.insert(x);
      std::string y2 = fresh_name(m->name, avoid);
      body = lsubst_type_in_expr(body, m->name, lt_var(y2));
      e->name = y2;
      changed = true;
    }
    auto nb = lsubst_type_in_expr(body, x, v);
    if (nb != m->a) { e->a = nb; changed = true; }
    return changed ? LExprP(e) : m;
  }
  LExprP base = changed ? LExprP(e) : m;
  return map_children(base, [&](const LExprP& c) { return lsubst_type_in_expr(c, x, v); });
}

LTypeP lsubst_proc(const LTypeP& t, const std::string& p, const std::string& q) {
  if (!t) return t;
  if (t->tag == LTypeTag::Proc) return t->name == p ? lt_proc(q) : t;
  auto a = lsubst_proc(t->a, p, q), b = lsubst_proc(t->b, p, q), c = lsubst_proc(t->c, p, q);
  if (a == t->a && b == t->b && c == t->c) return t;
  return mkt(t->tag, t->name, a, b, c);
}

LExprP lsubst_proc(const LExprP& m, const std::string& p, const std::string& q) {
  if (!m) return m;
  auto e = copy(m);
  bool changed = false;
  for (auto* t : {&e->ty, &e->who, &e->who2}) {
    if (!*t) continue;
    auto n = lsubst_proc(*t, p, q);
    if (n != *t) { *t = n; changed = true; }
  }
  LExprP base = changed ? LExprP(e) : m;
  return map_children(base, [&](const LExprP& c) { return lsubst_proc(c, p, q); });
}

LTypeP lreplace_proc(const LTypeP& t, const std::string& p, const LTypeP& v) {
  if (!t) return t;
  if (t->tag == LTypeTag::Proc) return t->name == p ? v : t;
  auto a = lreplace_proc(t->a, p, v), b = lreplace_proc(t->b, p, v), c = lreplace_proc(t->c, p, v);
  if (a == t->a && b == t->b && c == t->c) return t;
  return mkt(t->tag, t->name, a, b, c);
}

LExprP lreplace_proc(const LExprP& m, const std::string& p, const LTypeP& v) {
  if (!m) return m;
  auto e = copy(m);
  bool changed = false;
  for (auto* t : {&e->ty, &e->who, &e->who2}) {
    if (!*t) continue;
    auto n = lreplace_proc(*t, p, v);
    if (n != *t) { *t = n; changed = true; }
  }
  LExprP base = changed ? LExprP(e) : m;
  return map_children(base, [&](const LExprP& c) { return lreplace_proc(c, p, v); });
}

LExprP plug_hole(const LExprP& m, const LExprP& v) {
  if (!m) return m;
  if (m->tag == LExprTag::Hole) return v;
  return map_children(m, [&](const LExprP& c) { return plug_hole(c, v); });
}

// ---------------------------------------------------------------- local type normalization

LTypeP lnormalize_at(const std::string& self, const LTypeP& t) {
  if (!t) return t;
  switch (t->tag) {
    case LTypeTag::Var:
    case LTypeTag::Proc:
    case LTypeTag::Unit:
    case LTypeTag::Int:
    case LTypeTag::Str:
    case LTypeTag::Bot: return t;
    case LTypeTag::AmI: {
      auto who = lnormalize_at(self, t->a);
      if (who->tag == LTypeTag::Proc) return lnormalize_at(self, who->name == self ? t->b : t->c);
      return lt_ami(who, lnormalize_at(self, t->b), lnormalize_at(self, t->c));
    }
    case LTypeTag::App: {
      auto f = lnormalize_at(self, t->a);
      auto x = lnormalize_at(self, t->b);
      if (f->tag == LTypeTag::TLam) return lnormalize_at(self, lsubst_type(f->a, f->name, x));
      return lt_app(f, x);
    }
    case LTypeTag::Forall:
    case LTypeTag::TLam: {
      auto body = lnormalize_at(self, t->a);
      return body == t->a ? t : mkt(t->tag, t->name, body);
    }
    default: {
      auto a = lnormalize_at(self, t->a), b = lnormalize_at(self, t->b);
      if (a == t->a && b == t->b) return t;
      return mkt(t->tag, t->name, a, b);
    }
  }
}

bool ltype_equiv_at(const std::string& self, const LTypeP& a, const LTypeP& b) {
  return lalpha_eq(lnormalize_at(self, a), lnormalize_at(self, b));
}

// ---------------------------------------------------------------- canonical forms

namespace {

struct LCanon {
  std::vector<std::pair<std::string, std::string>> tyenv, tmenv;

  static std::string look(const std::vector<std::pair<std::string, std::string>>& env, const std::string& x) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == x) return it->second;
    return x;
  }
  std::string type(const LTypeP& t) {
    if (!t) return "-";
    switch (t->tag) {
      case LTypeTag::Var: return "v:" + look(tyenv, t->name);
      case LTypeTag::Proc: return "p:" + t->name;
      case LTypeTag::Unit: return "U";
      case LTypeTag::Int: return "I";
      case LTypeTag::Str: return "S";
      case LTypeTag::Bot: return "B";
      case LTypeTag::Arrow: return "(" + type(t->a) + "->" + type(t->b) + ")";
      case LTypeTag::Sum: return "(" + type(t->a) + "+" + type(t->b) + ")";
      case LTypeTag::Prod: return "(" + type(t->a) + "*" + type(t->b) + ")";
      case LTypeTag::App: return "(" + type(t->a) + " " + type(t->b) + ")";
      case LTypeTag::AmI: return "ami(" + type(t->a) + "," + type(t->b) + "," + type(t->c) + ")";
      case LTypeTag::Forall:
      case LTypeTag::TLam: {
        tyenv.emplace_back(t->name, "#" + std::to_string(tyenv.size()));
        std::string body = type(t->a);
        tyenv.pop_back();
        return std::string(t->tag == LTypeTag::Forall ? "A." : "L.") + body;
      }
    }
    return "?";
  }
  std::string bind(const std::string& x, const LExprP& body) {
    tmenv.emplace_back(x, "%" + std::to_string(tmenv.size()));
    std::string r = expr(body);
    tmenv.pop_back();
    return r;
  }
  std::string expr(const LExprP& m) {
    switch (m->tag) {
      case LExprTag::Var: return look(tmenv, m->name);
      case LExprTag::Unit: return "()";
      case LExprTag::Int: return std::to_string(m->n);
      case LExprTag::Str: return "\"" + m->str + "\"";
      case LExprTag::Bot: return "_|_";
      case LExprTag::Hole: return "[]";
      case LExprTag::Fun: return "f:" + m->name;
      case LExprTag::Lam: return "\\" + type(m->ty) + "." + bind(m->name, m->a);
      case LExprTag::TLam: {
        tyenv.emplace_back(m->name, "#" + std::to_string(tyenv.size()));
        std::string body = expr(m->a);
        tyenv.pop_back();
        return "/\\." + body;
      }
      case LExprTag::App: return "(" + expr(m->a) + " " + expr(m->b) + ")";
      case LExprTag::TApp: return "(" + expr(m->a) + " [" + type(m->ty) + "])";
      case LExprTag::Inl: return "inl[" + type(m->ty) + "](" + expr(m->a) + ")";
      case LExprTag::Inr: return "inr[" + type(m->ty) + "](" + expr(m->a) + ")";
      case LExprTag::Case: return "case(" + expr(m->a) + "|" + bind(m->name, m->b) + "|" + bind(m->name2, m->c) + ")";
      case LExprTag::Pair: return "(" + expr(m->a) + "," + expr(m->b) + ")";
      case LExprTag::Fst: return "fst(" + expr(m->a) + ")";
      case LExprTag::Snd: return "snd(" + expr(m->a) + ")";
      case LExprTag::Send: return "send[" + type(m->who) + "]";
      case LExprTag::Recv: return "recv[" + type(m->who) + "]";
      case LExprTag::Sub: return "sub[" + type(m->who) + ":=" + type(m->who2) + "]";
      case LExprTag::Choose: return "choose[" + type(m->who) + "]" + m->name + ";" + expr(m->a);
      case LExprTag::Offer: {
        std::string s = "offer[" + type(m->who) + "]{";
        for (auto& [l, br] : m->branches) s += l + ":" + expr(br) + ",";
        return s + "}";
      }
      case LExprTag::AmI: return "ami(" + type(m->who) + "," + expr(m->a) + "," + expr(m->b) + ")";
    }
    return "?";
  }
};

}  // namespace

std::string lcanon(const LTypeP& t) { return LCanon{}.type(t); }
std::string lcanon(const LExprP& m) { return LCanon{}.expr(m); }
bool lalpha_eq(const LTypeP& a, const LTypeP& b) { return lcanon(a) == lcanon(b); }
bool lalpha_eq(const LExprP& a, const LExprP& b) { return lcanon(a) == lcanon(b); }

std::size_t lexpr_size(const LExprP& m) {
  if (!m) return 0;
  std::size_t n = 1 + lexpr_size(m->a) + lexpr_size(m->b) + lexpr_size(m->c);
  for (auto& [l, br] : m->branches) n += lexpr_size(br);
  return n;
}

}  // namespace polychor
