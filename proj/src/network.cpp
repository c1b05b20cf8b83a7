#include "polychor/network.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "polychor/syntax.hpp"

namespace polychor {

namespace {

std::shared_ptr<LExpr> copy(const LExprP& m) { return std::make_shared<LExpr>(*m); }

LExprP with_child(const LExprP& m, int which, LExprP v) {
  auto e = copy(m);
  (which == 0 ? e->a : e->b) = std::move(v);
  return e;
}

const std::string* proc_name(const LTypeP& t) {
  return t && t->tag == LTypeTag::Proc ? &t->name : nullptr;
}

LocalStep tau(LExprP next, const char* rule) {
  LocalStep s;
  s.label.kind = LocalLabel::Kind::Tau;
  s.label.rule = rule;
  s.next = std::move(next);
  return s;
}

void transitions(const std::string& self, const LExprP& m, const LDefs& d, std::vector<LocalStep>& out);

void congruence(const std::string& self, const LExprP& m, int which, const LDefs& d, std::vector<LocalStep>& out) {
  std::vector<LocalStep> inner;
  transitions(self, which == 0 ? m->a : m->b, d, inner);
  for (auto& s : inner) {
    s.next = with_child(m, which, s.next);
    out.push_back(std::move(s));
  }
}

void transitions(const std::string& self, const LExprP& m, const LDefs& d, std::vector<LocalStep>& out) {
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
    case LExprTag::Sub:
    case LExprTag::Hole: return;
    case LExprTag::Fun: {
      auto it = d.find(m->name);
      if (it != d.end()) out.push_back(tau(it->second, "NDef"));
      return;
    }
    case LExprTag::AmI: {
      const std::string* who = proc_name(m->who);
      if (!who) return;
      LocalStep s;
      s.label.kind = LocalLabel::Kind::Iam;
      s.label.peer = self;
      s.label.rule = *who == self ? "NAmIR" : "NAmIL";
      s.next = *who == self ? m->a : m->b;
      out.push_back(std::move(s));
      return;
    }
    case LExprTag::Choose: {
      const std::string* to = proc_name(m->who);
      if (!to) return;
      LocalStep s;
      s.label.kind = LocalLabel::Kind::Choose;
      s.label.peer = *to;
      s.label.label = m->name;
      s.label.rule = "NCho";
      s.next = m->a;
      out.push_back(std::move(s));
      return;
    }
    case LExprTag::Offer: {
      const std::string* from = proc_name(m->who);
      if (!from) return;
      for (auto& [l, br] : m->branches) {
        LocalStep s;
        s.label.kind = LocalLabel::Kind::Offer;
        s.label.peer = *from;
        s.label.label = l;
        s.label.rule = "Noff";
        s.next = br;
        out.push_back(std::move(s));
      }
      return;
    }
    case LExprTag::App: {
      if (!is_lvalue(m->a)) return congruence(self, m, 0, d, out);
      if (!is_lvalue(m->b)) return congruence(self, m, 1, d, out);
      const LExprP& f = m->a;
      const LExprP& v = m->b;
      switch (f->tag) {
        case LExprTag::Lam: out.push_back(tau(lsubst_expr(f->a, f->name, v), "NAbsApp")); return;
        case LExprTag::Bot:
          if (le_is_bot(v)) out.push_back(tau(le_bot(), "NBot"));
          return;
        case LExprTag::Sub: {
          const std::string *p = proc_name(f->who), *q = proc_name(f->who2);
          if (p && q) out.push_back(tau(lsubst_proc(v, *p, *q), "NSub"));
          return;
        }
        case LExprTag::Send:
        case LExprTag::Recv: {
          const std::string* peer = proc_name(f->who);
          if (!peer) return;
          LocalStep s;
          s.label.kind = f->tag == LExprTag::Send ? LocalLabel::Kind::Send : LocalLabel::Kind::Recv;
          s.label.peer = *peer;
          s.label.value = v;
          s.label.rule = f->tag == LExprTag::Send ? "NSend" : "NRecv";
          s.next = le_hole();
          out.push_back(std::move(s));
          return;
        }
        default: return;
      }
    }
    case LExprTag::TApp: {
      if (!is_lvalue(m->a)) {
        std::vector<LocalStep> inner;
        transitions(self, m->a, d, inner);
        for (auto& s : inner) {
          s.next = with_child(m, 0, s.next);
          out.push_back(std::move(s));
        }
        return;
      }
      if (m->a->tag == LExprTag::TLam) {
        LocalStep s;
        s.label.kind = LocalLabel::Kind::Iam;
        s.label.peer = self;
        s.label.rule = "NBAbs";
        s.next = lsubst_type_in_expr(m->a->a, m->a->name, lnormalize_at(self, m->ty));
        out.push_back(std::move(s));
      } else if (le_is_bot(m->a)) {
        out.push_back(tau(le_bot(), "NBott"));
      }
      return;
    }
    case LExprTag::Inl:
    case LExprTag::Inr: return congruence(self, m, 0, d, out);
    case LExprTag::Case: {
      if (!is_lvalue(m->a)) return congruence(self, m, 0, d, out);
      if (m->a->tag == LExprTag::Inl) out.push_back(tau(lsubst_expr(m->b, m->name, m->a->a), "NCaseL"));
      if (m->a->tag == LExprTag::Inr) out.push_back(tau(lsubst_expr(m->c, m->name2, m->a->a), "NCaseR"));
      return;
    }
    case LExprTag::Pair: {
      if (!is_lvalue(m->a)) return congruence(self, m, 0, d, out);
      if (!is_lvalue(m->b)) return congruence(self, m, 1, d, out);
      return;
    }
    case LExprTag::Fst:
    case LExprTag::Snd: {
      if (!is_lvalue(m->a)) return congruence(self, m, 0, d, out);
      if (m->a->tag == LExprTag::Pair)
        out.push_back(m->tag == LExprTag::Fst ? tau(m->a->a, "NProj1") : tau(m->a->b, "NProj2"));
      // A pair of bottoms collapses to bottom, so its projections must too.
      if (le_is_bot(m->a)) out.push_back(tau(le_bot(), "NProjBot"));
      return;
    }
  }
}

// Projection never yields a pair of two bottoms, but evaluation can, e.g. once
// both halves of (choose[q] l; ⊥, ⊥) have run. Collapsing keeps the reduct
// comparable with the projection of the choreography reduct and lets NBot fire.
LExprP collapse_bottom_pairs(const LExprP& m) {
  if (!m) return m;
  LExprP a = collapse_bottom_pairs(m->a), b = collapse_bottom_pairs(m->b), c = collapse_bottom_pairs(m->c);
  if (m->tag == LExprTag::Pair && le_is_bot(a) && le_is_bot(b)) return le_bot();
  bool changed = a != m->a || b != m->b || c != m->c;
  std::map<std::string, LExprP> br;
  for (auto& [l, x] : m->branches) {
    br[l] = collapse_bottom_pairs(x);
    changed |= br[l] != x;
  }
  if (!changed) return m;
  auto e = copy(m);
  e->a = a;
  e->b = b;
  e->c = c;
  e->branches = std::move(br);
  return e;
}

std::vector<std::string> sorted_pair(const std::string& a, const std::string& b) {
  return a < b ? std::vector<std::string>{a, b} : std::vector<std::string>{b, a};
}

}  // namespace

std::vector<LocalStep> local_transitions(const std::string& self, const LExprP& l, const LDefs& d) {
  std::vector<LocalStep> out;
  transitions(self, l, d, out);
  return out;
}

std::vector<NetStep> net_transitions(const Network& n, const LDefs& d, ComRule rule) {
  std::map<std::string, std::vector<LocalStep>> local;
  for (auto& [r, l] : n) local[r] = local_transitions(r, l, d);

  std::vector<NetStep> out;
  for (auto& [r, steps] : local) {
    for (auto& s : steps) {
      switch (s.label.kind) {
        case LocalLabel::Kind::Tau:
        case LocalLabel::Kind::Iam: {
          // NProam: a process may only act on its own identity.
          if (s.label.kind == LocalLabel::Kind::Iam && s.label.peer != r)
            throw std::logic_error("identity step of " + s.label.peer + " executed at " + r);
          NetStep ns;
          ns.label.kind = s.label.kind == LocalLabel::Kind::Tau ? NetLabel::Kind::Tau : NetLabel::Kind::Iam;
          ns.label.participants = {r};
          ns.label.detail = s.label.rule + " @" + r;
          ns.next = n;
          ns.next[r] = s.next;
          out.push_back(std::move(ns));
          break;
        }
        case LocalLabel::Kind::Send: {
          const std::string& p = s.label.peer;
          if (p == r) break;
          auto it = local.find(p);
          if (it == local.end()) break;
          for (auto& t : it->second) {
            if (t.label.kind != LocalLabel::Kind::Recv || t.label.peer != r) continue;
            NetStep ns;
            ns.label.kind = NetLabel::Kind::Com;
            ns.label.participants = sorted_pair(r, p);
            ns.label.detail = "com " + r + " -> " + p;
            ns.next = n;
            LExprP delivered = lsubst_proc(s.label.value, r, p);
            if (rule == ComRule::Verbatim) {
              if (!lalpha_eq(delivered, s.label.value)) continue;
              delivered = s.label.value;
            }
            ns.next[r] = plug_hole(s.next, lsubst_proc(t.label.value, r, p));
            ns.next[p] = plug_hole(t.next, delivered);
            out.push_back(std::move(ns));
          }
          break;
        }
        case LocalLabel::Kind::Choose: {
          const std::string& p = s.label.peer;
          if (p == r) break;
          auto it = local.find(p);
          if (it == local.end()) break;
          for (auto& t : it->second) {
            if (t.label.kind != LocalLabel::Kind::Offer || t.label.peer != r || t.label.label != s.label.label)
              continue;
            NetStep ns;
            ns.label.kind = NetLabel::Kind::Sel;
            ns.label.participants = sorted_pair(r, p);
            ns.label.detail = "sel " + r + " -> " + p + " " + s.label.label;
            ns.next = n;
            ns.next[r] = s.next;
            ns.next[p] = t.next;
            out.push_back(std::move(ns));
          }
          break;
        }
        case LocalLabel::Kind::Recv:
        case LocalLabel::Kind::Offer: break;  // matched from the sending side
      }
    }
  }
  for (auto& ns : out)
    for (auto& r : ns.label.participants) ns.next[r] = collapse_bottom_pairs(ns.next[r]);
  return out;
}

// ---------------------------------------------------------------- merge

namespace {

bool same_type(const LTypeP& a, const LTypeP& b) {
  if (!a || !b) return !a && !b;
  return lalpha_eq(a, b);
}

// Brings two binders to a common name; returns the renamed bodies.
struct Aligned {
  std::string name;
  LExprP a, b;
};

Aligned align_term_binder(const std::string& x, const LExprP& a, const std::string& y, const LExprP& b) {
  if (x == y) return {x, a, b};
  std::set<std::string> avoid;
  all_names(a, avoid);
  all_names(b, avoid);
  avoid.insert(x);
  avoid.insert(y);
  std::string z = fresh_name(x, avoid);
  return {z, lsubst_expr(a, x, le_var(z)), lsubst_expr(b, y, le_var(z))};
}

Aligned align_type_binder(const std::string& x, const LExprP& a, const std::string& y, const LExprP& b) {
  if (x == y) return {x, a, b};
  std::set<std::string> avoid;
  all_names(a, avoid);
  all_names(b, avoid);
  avoid.insert(x);
  avoid.insert(y);
  std::string z = fresh_name(x, avoid);
  return {z, lsubst_type_in_expr(a, x, lt_var(z)), lsubst_type_in_expr(b, y, lt_var(z))};
}

}  // namespace

std::optional<LExprP> merge(const LExprP& a, const LExprP& b) {
  if (a == b) return a;
  if (a->tag != b->tag) return std::nullopt;
  auto sub = [](const LExprP& x, const LExprP& y) -> std::optional<LExprP> {
    if (!x || !y) return x || y ? std::nullopt : std::optional<LExprP>(LExprP{});
    return merge(x, y);
  };
  switch (a->tag) {
    case LExprTag::Var:
    case LExprTag::Fun:
      if (a->name != b->name) return std::nullopt;
      return a;
    case LExprTag::Unit:
    case LExprTag::Bot:
    case LExprTag::Hole: return a;
    case LExprTag::Int:
      if (a->n != b->n) return std::nullopt;
      return a;
    case LExprTag::Str:
      if (a->str != b->str) return std::nullopt;
      return a;
    case LExprTag::Send:
    case LExprTag::Recv:
      if (!same_type(a->who, b->who)) return std::nullopt;
      return a;
    case LExprTag::Sub:
      if (!same_type(a->who, b->who) || !same_type(a->who2, b->who2)) return std::nullopt;
      return a;
    case LExprTag::Lam: {
      if (!same_type(a->ty, b->ty)) return std::nullopt;
      Aligned al = align_term_binder(a->name, a->a, b->name, b->a);
      auto body = merge(al.a, al.b);
      if (!body) return std::nullopt;
      if (al.name == a->name && *body == a->a) return a;
      return le_lam(al.name, a->ty, *body);
    }
    case LExprTag::TLam: {
      Aligned al = align_type_binder(a->name, a->a, b->name, b->a);
      auto body = merge(al.a, al.b);
      if (!body) return std::nullopt;
      if (al.name == a->name && *body == a->a) return a;
      return le_tlam(al.name, *body);
    }
    case LExprTag::App:
    case LExprTag::Pair: {
      auto x = sub(a->a, b->a), y = sub(a->b, b->b);
      if (!x || !y) return std::nullopt;
      if (*x == a->a && *y == a->b) return a;
      return a->tag == LExprTag::App ? le_app(*x, *y) : le_pair(*x, *y);
    }
    case LExprTag::TApp: {
      if (!same_type(a->ty, b->ty)) return std::nullopt;
      auto x = merge(a->a, b->a);
      if (!x) return std::nullopt;
      return *x == a->a ? a : le_tapp(*x, a->ty);
    }
    case LExprTag::Inl:
    case LExprTag::Inr: {
      if (!same_type(a->ty, b->ty)) return std::nullopt;
      auto x = merge(a->a, b->a);
      if (!x) return std::nullopt;
      if (*x == a->a) return a;
      return a->tag == LExprTag::Inl ? le_inl(a->ty, *x) : le_inr(a->ty, *x);
    }
    case LExprTag::Fst:
    case LExprTag::Snd: {
      auto x = merge(a->a, b->a);
      if (!x) return std::nullopt;
      if (*x == a->a) return a;
      return a->tag == LExprTag::Fst ? le_fst(*x) : le_snd(*x);
    }
    case LExprTag::Case: {
      auto s = merge(a->a, b->a);
      if (!s) return std::nullopt;
      Aligned l = align_term_binder(a->name, a->b, b->name, b->b);
      Aligned r = align_term_binder(a->name2, a->c, b->name2, b->c);
      auto lb = merge(l.a, l.b), rb = merge(r.a, r.b);
      if (!lb || !rb) return std::nullopt;
      if (*s == a->a && l.name == a->name && *lb == a->b && r.name == a->name2 && *rb == a->c) return a;
      return le_case(*s, l.name, *lb, r.name, *rb);
    }
    case LExprTag::Choose: {
      if (!same_type(a->who, b->who) || a->name != b->name) return std::nullopt;
      auto x = merge(a->a, b->a);
      if (!x) return std::nullopt;
      return *x == a->a ? a : le_choose(a->who, a->name, *x);
    }
    case LExprTag::AmI: {
      if (!same_type(a->who, b->who)) return std::nullopt;
      auto x = merge(a->a, b->a), y = merge(a->b, b->b);
      if (!x || !y) return std::nullopt;
      if (*x == a->a && *y == a->b) return a;
      return le_ami(a->who, *x, *y);
    }
    case LExprTag::Offer: {
      if (!same_type(a->who, b->who)) return std::nullopt;
      std::map<std::string, LExprP> br = a->branches;
      bool changed = false;
      for (auto& [l, m] : b->branches) {
        auto it = br.find(l);
        if (it == br.end()) {
          br.emplace(l, m);
          changed = true;
          continue;
        }
        auto x = merge(it->second, m);
        if (!x) return std::nullopt;
        if (*x != it->second) {
          it->second = *x;
          changed = true;
        }
      }
      return changed ? le_offer(a->who, std::move(br)) : a;
    }
  }
  return std::nullopt;
}

bool branching_geq(const LExprP& a, const LExprP& b) {
  auto m = merge(a, b);
  return m && lalpha_eq(*m, a);
}

bool network_geq(const Network& a, const Network& b) {
  auto get = [](const Network& n, const std::string& p) {
    auto it = n.find(p);
    return it == n.end() ? le_bot() : it->second;
  };
  for (auto& [p, l] : a)
    if (!branching_geq(l, get(b, p))) return false;
  for (auto& [p, l] : b)
    if (!a.count(p) && !branching_geq(le_bot(), l)) return false;
  return true;
}

LExprP strip_bottom_apps(const LExprP& l) {
  if (!l) return l;
  if (l->tag == LExprTag::App && le_is_bot(l->a)) return strip_bottom_apps(l->b);
  LExprP a = strip_bottom_apps(l->a), b = strip_bottom_apps(l->b), c = strip_bottom_apps(l->c);
  bool changed = a != l->a || b != l->b || c != l->c;
  std::map<std::string, LExprP> br;
  for (auto& [k, x] : l->branches) {
    br[k] = strip_bottom_apps(x);
    changed |= br[k] != x;
  }
  if (!changed) return l;
  auto e = copy(l);
  e->a = a;
  e->b = b;
  e->c = c;
  e->branches = std::move(br);
  return e;
}

Network strip_bottom_apps(const Network& n) {
  Network out;
  for (auto& [p, l] : n) out[p] = strip_bottom_apps(l);
  return out;
}

bool all_values(const Network& n) {
  return std::all_of(n.begin(), n.end(), [](auto& e) { return is_lvalue(e.second); });
}

std::string network_canon(const Network& n) {
  std::string s;
  for (auto& [p, l] : n) {
    s += p;
    s += '=';
    s += lcanon(l);
    s += ';';
  }
  return s;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t network_hash(const Network& n) { return fnv1a64(network_canon(n)); }

std::string print_network(const Network& n) {
  std::string s;
  for (auto& [p, l] : n) s += p + "[" + print(l) + "]\n";
  return s;
}

RunResult run_network(const Network& n, const LDefs& d, Policy policy, std::uint64_t seed, std::int64_t fuel) {
  RunResult r;
  r.final = n;
  std::mt19937_64 rng(seed);
  std::vector<std::string> order;
  for (auto& [p, l] : n) order.push_back(p);
  std::size_t turn = 0;
  for (;;) {
    auto steps = net_transitions(r.final, d);
    if (steps.empty()) {
      r.kind = all_values(r.final) ? RunResult::Kind::AllValues : RunResult::Kind::Deadlock;
      return r;
    }
    if (r.steps >= fuel) {
      r.kind = RunResult::Kind::Timeout;
      return r;
    }
    std::size_t pick = 0;
    if (policy == Policy::Random) {
      pick = std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(rng);
    } else {
      // First process in cyclic order, starting at `turn`, that can take part in a step.
      bool found = false;
      for (std::size_t k = 0; k < order.size() && !found; ++k) {
        const std::string& who = order[(turn + k) % order.size()];
        for (std::size_t i = 0; i < steps.size(); ++i) {
          auto& ps = steps[i].label.participants;
          if (std::find(ps.begin(), ps.end(), who) != ps.end()) {
            pick = i;
            turn = (turn + k + 1) % order.size();
            found = true;
            break;
          }
        }
      }
    }
    r.labels.push_back(steps[pick].label);
    r.final = std::move(steps[pick].next);
    r.hashes.push_back(network_hash(r.final));
    ++r.steps;
  }
}

const char* to_string(RunResult::Kind k) {
  switch (k) {
    case RunResult::Kind::AllValues: return "AllValues";
    case RunResult::Kind::Deadlock: return "Deadlock";
    case RunResult::Kind::Timeout: return "Timeout";
  }
  return "?";
}

const char* to_string(NetLabel::Kind k) {
  switch (k) {
    case NetLabel::Kind::Tau: return "tau";
    case NetLabel::Kind::Iam: return "iam";
    case NetLabel::Kind::Com: return "com";
    case NetLabel::Kind::Sel: return "sel";
  }
  return "?";
}

}  // namespace polychor
