#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>

#include "polychor/core.hpp"

namespace polychor {

struct LType;
using LTypeP = std::shared_ptr<const LType>;

enum class LTypeTag { Var, Proc, Unit, Int, Str, Bot, Arrow, Sum, Prod, Forall, TLam, App, AmI };

struct LType {
  LTypeTag tag;
  std::string name;  // Var, Proc, Forall/TLam binder
  LTypeP a, b, c;    // Arrow/Sum/Prod/App(a,b); Forall/TLam body a; AmI(who=a, then=b, else=c)
};

LTypeP lt_var(std::string x);
LTypeP lt_proc(std::string p);
LTypeP lt_unit();
LTypeP lt_int();
LTypeP lt_str();
LTypeP lt_bot();
LTypeP lt_arrow(LTypeP a, LTypeP b);
LTypeP lt_sum(LTypeP a, LTypeP b);
LTypeP lt_prod(LTypeP a, LTypeP b);
LTypeP lt_forall(std::string x, LTypeP body);
LTypeP lt_tlam(std::string x, LTypeP body);
LTypeP lt_app(LTypeP f, LTypeP x);
LTypeP lt_ami(LTypeP who, LTypeP then_, LTypeP else_);
bool lt_is_bot(const LTypeP& t);

struct LExpr;
using LExprP = std::shared_ptr<const LExpr>;

enum class LExprTag {
  Var, Unit, Int, Str, Bot, Lam, TLam, App, TApp, Inl, Inr, Case, Pair, Fst, Snd,
  Send, Recv, Offer, Choose, Sub, Fun, AmI,
  Hole  // placeholder for the value delivered by a pending send/recv
};

struct LExpr {
  LExprTag tag;
  std::string name;   // Var/Fun, Lam/TLam/Case-left binder, Choose label
  std::string name2;  // Case right binder
  std::int64_t n = 0;
  std::string str;
  LTypeP ty;          // Lam annotation, TApp argument, Inl/Inr other summand
  LTypeP who, who2;   // Send/Recv/Offer/Choose peer, AmI subject; Sub(from=who, to=who2)
  LExprP a, b, c;
  std::map<std::string, LExprP> branches;  // Offer
};

LExprP le_var(std::string x);
LExprP le_unit();
LExprP le_int(std::int64_t n);
LExprP le_str(std::string s);
LExprP le_bot();
LExprP le_lam(std::string x, LTypeP ann, LExprP body);
LExprP le_tlam(std::string x, LExprP body);
LExprP le_app(LExprP f, LExprP x);
LExprP le_tapp(LExprP f, LTypeP t);
LExprP le_inl(LTypeP other, LExprP m);
LExprP le_inr(LTypeP other, LExprP m);
LExprP le_case(LExprP m, std::string x, LExprP l, std::string y, LExprP r);
LExprP le_pair(LExprP a, LExprP b);
LExprP le_fst(LExprP m);
LExprP le_snd(LExprP m);
LExprP le_send(LTypeP to);
LExprP le_recv(LTypeP from);
LExprP le_offer(LTypeP from, std::map<std::string, LExprP> branches);
LExprP le_choose(LTypeP to, std::string label, LExprP m);
LExprP le_sub(LTypeP from, LTypeP to);
LExprP le_fun(std::string f);
LExprP le_ami(LTypeP who, LExprP then_, LExprP else_);
LExprP le_hole();

bool le_is_bot(const LExprP& m);
bool is_lvalue(const LExprP& m);

using LDefs = std::map<std::string, LExprP>;

void all_names(const LTypeP& t, std::set<std::string>& out);
void all_names(const LExprP& m, std::set<std::string>& out);

LTypeP lsubst_type(const LTypeP& t, const std::string& x, const LTypeP& v);
LExprP lsubst_expr(const LExprP& m, const std::string& x, const LExprP& v);
LExprP lsubst_type_in_expr(const LExprP& m, const std::string& x, const LTypeP& v);
// Renames process p to q in every position (role substitution of NSub and NCom).
LTypeP lsubst_proc(const LTypeP& t, const std::string& p, const std::string& q);
LExprP lsubst_proc(const LExprP& m, const std::string& p, const std::string& q);
// Replaces process-name leaves p by v without capture checks (v should be fresh).
LTypeP lreplace_proc(const LTypeP& t, const std::string& p, const LTypeP& v);
LExprP lreplace_proc(const LExprP& m, const std::string& p, const LTypeP& v);
// Replaces the unique Hole node.
LExprP plug_hole(const LExprP& m, const LExprP& v);

// Normal form of a local type at process `self` (AmI resolved where the subject is a name).
LTypeP lnormalize_at(const std::string& self, const LTypeP& t);
bool ltype_equiv_at(const std::string& self, const LTypeP& a, const LTypeP& b);

std::string lcanon(const LTypeP& t);
std::string lcanon(const LExprP& m);
bool lalpha_eq(const LTypeP& a, const LTypeP& b);
bool lalpha_eq(const LExprP& a, const LExprP& b);

std::size_t lexpr_size(const LExprP& m);

}  // namespace polychor
