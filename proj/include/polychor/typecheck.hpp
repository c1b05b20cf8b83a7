#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "polychor/core.hpp"
#include "polychor/syntax.hpp"

namespace polychor {

// Error codes: TypeMismatch, UnboundVar, NotAFunction, ProcessEscape, ComMentionsEndpoint,
// SelectEndpointNotProc, UnboundTypeVar, NotAProcess, KindMismatch, IllKinded.
struct TypeError : std::runtime_error {
  std::string code;
  const Expr* node;
  TypeError(std::string code_, const std::string& msg, const Expr* at = nullptr)
      : std::runtime_error(code_ + ": " + msg), code(std::move(code_)), node(at) {}
};

enum class EntryTag { Var, Fun, TyVar, Proc };

struct CtxEntry {
  EntryTag tag;
  std::string name;
  TypeP type;  // Var, Fun
  KindP kind;  // TyVar, Proc
};

struct Ctx {
  ProcSet universe;
  ProcSet theta;
  std::vector<CtxEntry> gamma;  // later entries shadow earlier ones
  // Off while synthesizing a lambda body's type before its process restriction is known.
  bool enforce_theta = true;

  const CtxEntry* lookup_term(const std::string& x) const;
  const CtxEntry* lookup_type(const std::string& x) const;
  TypeP ident_type(const std::string& x) const;  // Proc node for declared processes, Var otherwise
};
using CtxP = std::shared_ptr<const Ctx>;

// Theta = all processes (main) or empty (definitions); gamma holds p::Proc and def signatures.
Ctx initial_ctx(const ProcSet& universe, const Defs& defs, bool full_theta);

Ctx ctx_plus(const Ctx& c, const std::string& v);
Ctx ctx_restrict_sym(const Ctx& c, const ProcSet& rho, const std::string& x);
// Context for the body of a binder X::K (shared by TabsT, Kall and Kabs).
Ctx ctx_bind_tyvar(const Ctx& c, const std::string& x, const KindP& k);
Ctx ctx_bind_var(const Ctx& c, const std::string& x, const TypeP& t);

bool subkind(const KindP& a, const KindP& b);

// Minimal kind where process names carry their declared kind.
KindP kind_of(const Ctx& c, const TypeP& t);
// Minimal kind where a process name also excludes every other declared process.
KindP kind_of_max(const Ctx& c, const TypeP& t);
// Kind check with subsumption.
bool has_kind(const Ctx& c, const TypeP& t, const KindP& k);

TypeP normalize(const TypeP& t);
TypeP normalize_type(const Ctx& c, const TypeP& t);
bool type_equiv(const Ctx& c, const TypeP& a, const TypeP& b);

struct TypedExpr;
using TypedP = std::shared_ptr<const TypedExpr>;

struct TypedExpr {
  ExprP expr;
  TypeP type;  // normalized
  CtxP ctx;    // context the node was typed in
  std::vector<TypedP> kids;
  // Kind of the embedded type: Lam annotation, TApp argument, Inl/Inr summand, Com transformer.
  KindP type_kind;
};

TypedP type_of(const Ctx& c, const ExprP& m);

struct CheckedUnit {
  SourceUnit unit;
  Ctx main_ctx;
  Ctx def_ctx;
  TypedP main;
  std::map<std::string, TypedP> defs;
};

std::map<std::string, TypedP> check_defs(const SourceUnit& u);
CheckedUnit check_unit(const SourceUnit& u);

}  // namespace polychor
