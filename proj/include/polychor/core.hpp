#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace polychor {

// Identifiers standing for process names or Proc-kinded type variables.
using ProcSet = std::set<std::string>;

ProcSet set_union(const ProcSet& a, const ProcSet& b);
ProcSet set_inter(const ProcSet& a, const ProcSet& b);
ProcSet set_minus(const ProcSet& a, const ProcSet& b);
bool set_subset(const ProcSet& a, const ProcSet& b);

struct Kind;
using KindP = std::shared_ptr<const Kind>;

enum class KindTag { Star, Proc, Arrow, Without };

struct Kind {
  KindTag tag;
  KindP a, b;      // Arrow(a, b); Without(a, ex)
  ProcSet ex;
};

KindP k_star();
KindP k_proc();
KindP k_arrow(KindP a, KindP b);
// Flattens nested Without by union; Without(k, {}) collapses to k.
KindP k_without(KindP base, ProcSet ex);

// Base kind under any Without layer, and the excluded set (empty if none).
KindP k_base(const KindP& k);
const ProcSet& k_excluded(const KindP& k);
bool k_is_without(const KindP& k);
// Proc or Proc\rho.
bool k_is_procish(const KindP& k);
bool kind_equal(const KindP& a, const KindP& b);

struct Type;
using TypeP = std::shared_ptr<const Type>;

enum class TypeTag { Var, Proc, App, Arrow, Sum, Prod, Forall, TLam, Unit, Int, Str };

struct Type {
  TypeTag tag;
  std::string name;  // Var, Proc, binder of Forall/TLam
  TypeP a, b;        // App(a,b); Arrow/Sum/Prod(a,b); Forall/TLam body in a; base types: location in a
  ProcSet rho;       // Arrow
  KindP kind;        // Forall/TLam binder kind
};

TypeP t_var(std::string x);
TypeP t_proc(std::string p);
TypeP t_app(TypeP f, TypeP x);
TypeP t_arrow(TypeP a, ProcSet rho, TypeP b);
TypeP t_sum(TypeP a, TypeP b);
TypeP t_prod(TypeP a, TypeP b);
TypeP t_forall(std::string x, KindP k, TypeP body);
TypeP t_tlam(std::string x, KindP k, TypeP body);
// Located base types. Substitution may build these with a non-value location
// while a type is being normalized; the parser and checker reject such input.
TypeP t_unit(TypeP loc);
TypeP t_int(TypeP loc);
TypeP t_str(TypeP loc);
// ()@p + ()@p
TypeP t_bool(TypeP loc);

bool is_type_value(const TypeP& t);

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

enum class ExprTag {
  Var, Unit, Int, Str, Lam, TLam, App, TApp, Inl, Inr, Case, Pair, Fst, Snd, Com, Select, Fun
};

struct Expr {
  ExprTag tag;
  std::string name;   // Var/Fun name, Lam/TLam binder, Case left binder, Select label
  std::string name2;  // Case right binder
  std::int64_t n = 0;
  std::string str;
  TypeP ty;           // base value location, Lam annotation, TApp argument, Inl/Inr other summand, Com transformer
  TypeP src, dst;     // Com and Select endpoints
  KindP kind;         // TLam binder kind
  ProcSet rho;        // Lam arrow decoration
  bool rho_auto = false;  // let-bound lambda: decoration chosen by the checker
  ExprP a, b, c;      // children
};

ExprP e_var(std::string x);
ExprP e_fun(std::string f);
ExprP e_unit(TypeP loc);
ExprP e_int(std::int64_t n, TypeP loc);
ExprP e_str(std::string s, TypeP loc);
ExprP e_lam(std::string x, TypeP ann, ProcSet rho, ExprP body, bool rho_auto = false);
ExprP e_tlam(std::string x, KindP k, ExprP body);
ExprP e_app(ExprP f, ExprP x);
ExprP e_tapp(ExprP f, TypeP t);
ExprP e_inl(TypeP other, ExprP m);
ExprP e_inr(TypeP other, ExprP m);
ExprP e_case(ExprP m, std::string x, ExprP l, std::string y, ExprP r);
ExprP e_pair(ExprP a, ExprP b);
ExprP e_fst(ExprP m);
ExprP e_snd(ExprP m);
ExprP e_com(TypeP transformer, TypeP src, TypeP dst);
ExprP e_select(TypeP src, TypeP dst, std::string label, ExprP m);

bool is_value(const ExprP& m);

struct Def {
  std::string name;
  TypeP sig;
  ExprP body;
};
using Defs = std::map<std::string, Def>;

// Free type variables; identifiers in rho sets and kind exclusions count when
// they are not process names of the universe.
std::set<std::string> ftv(const TypeP& t, const ProcSet& universe);
std::set<std::string> ftv_kind(const KindP& k, const ProcSet& universe);
ProcSet roles(const TypeP& t, const ProcSet& universe);
ProcSet mn(const TypeP& t, const ProcSet& universe);

// Every identifier occurring anywhere (free or bound), used for fresh names.
void all_names(const TypeP& t, std::set<std::string>& out);
void all_names(const KindP& k, std::set<std::string>& out);
void all_names(const ExprP& m, std::set<std::string>& out);

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// Capture-avoiding substitutions. Identifiers in rho sets and kind exclusions
// are rewritten when the replacement is a variable or process name.
KindP subst_kind(const KindP& k, const std::string& x, const TypeP& v);
TypeP subst_type(const TypeP& t, const std::string& x, const TypeP& v);
ExprP subst_expr(const ExprP& m, const std::string& x, const ExprP& v);
ExprP subst_type_in_expr(const ExprP& m, const std::string& x, const TypeP& v);

// Renames process p to q everywhere.
KindP subst_proc(const KindP& k, const std::string& p, const std::string& q);
TypeP subst_proc(const TypeP& t, const std::string& p, const std::string& q);
ExprP subst_proc(const ExprP& m, const std::string& p, const std::string& q);

std::set<std::string> free_vars(const ExprP& m);
std::set<std::string> ftv_expr(const ExprP& m, const ProcSet& universe);
// Process names literally occurring in a term (locations, endpoints, annotations).
ProcSet proc_literals(const ExprP& m, const ProcSet& universe);
ProcSet proc_literals(const TypeP& t, const ProcSet& universe);

// Alpha-invariant canonical renderings (bound names replaced positionally).
std::string canon(const KindP& k);
std::string canon(const TypeP& t);
std::string canon(const ExprP& m);
bool alpha_eq(const TypeP& a, const TypeP& b);
bool alpha_eq(const ExprP& a, const ExprP& b);

std::size_t expr_size(const ExprP& m);

}  // namespace polychor
