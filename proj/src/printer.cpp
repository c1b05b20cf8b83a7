#include <sstream>

#include "polychor/syntax.hpp"

namespace polychor {

std::string print_set(const ProcSet& s) {
  std::string out = "{";
  bool first = true;
  for (auto& x : s) {
    if (!first) out += ", ";
    out += x;
    first = false;
  }
  return out + "}";
}

namespace {

std::string paren(bool p, const std::string& s) { return p ? "(" + s + ")" : s; }

std::string kind_str(const KindP& k, bool noarrow) {
  switch (k->tag) {
    case KindTag::Star: return "*";
    case KindTag::Proc: return "proc";
    case KindTag::Arrow: return paren(noarrow, kind_str(k->a, true) + " => " + kind_str(k->b, false));
    case KindTag::Without: {
      std::string base = kind_str(k->a, true);
      if (k->a->tag == KindTag::Arrow) base = "(" + kind_str(k->a, false) + ")";
      return base + " \\ " + print_set(k->ex);
    }
  }
  return "?";
}

// Type precedence: 0 binders/arrow, 1 sum, 2 product, 3 application, 4 atom.
std::string type_str(const TypeP& t, int prec) {
  switch (t->tag) {
    case TypeTag::Var:
    case TypeTag::Proc: return t->name;
    case TypeTag::Unit: return "()@" + type_str(t->a, 4);
    case TypeTag::Int: return "Int@" + type_str(t->a, 4);
    case TypeTag::Str: return "String@" + type_str(t->a, 4);
    case TypeTag::Sum:
      if (t->a->tag == TypeTag::Unit && t->b->tag == TypeTag::Unit && alpha_eq(t->a->a, t->b->a))
        return "Bool@" + type_str(t->a->a, 4);
      return paren(prec > 1, type_str(t->a, 1) + " + " + type_str(t->b, 2));
    case TypeTag::Prod: return paren(prec > 2, type_str(t->a, 2) + " * " + type_str(t->b, 3));
    case TypeTag::App: return paren(prec > 3, type_str(t->a, 3) + " " + type_str(t->b, 4));
    case TypeTag::Arrow: {
      std::string arrow = t->rho.empty() ? " -> " : " ->" + print_set(t->rho) + " ";
      return paren(prec > 0, type_str(t->a, 1) + arrow + type_str(t->b, 0));
    }
    case TypeTag::Forall:
      return paren(prec > 0, "forall " + t->name + "::" + kind_str(t->kind, false) + ". " + type_str(t->a, 0));
    case TypeTag::TLam:
      return paren(prec > 0, "fn " + t->name + "::" + kind_str(t->kind, true) + " => " + type_str(t->a, 0));
  }
  return "?";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') { out += "\\n"; continue; }
    if (c == '\t') { out += "\\t"; continue; }
    out += c;
  }
  return out + "\"";
}

bool is_if_sugar(const ExprP& m) {
  if (m->tag != ExprTag::Case) return false;
  auto starts = [](const std::string& x) { return x.rfind("_c", 0) == 0; };
  if (!starts(m->name) || !starts(m->name2)) return false;
  return !free_vars(m->b).count(m->name) && !free_vars(m->c).count(m->name2);
}

// Forms whose last component extends as far right as possible.
bool open_ended(const ExprP& m) {
  switch (m->tag) {
    case ExprTag::Lam:
    case ExprTag::TLam:
    case ExprTag::Case:
    case ExprTag::Select: return true;
    case ExprTag::App: return m->a->tag == ExprTag::Lam && m->a->rho_auto;
    default: return false;
  }
}

// Expression precedence: 0 open forms, 1 application, 2 prefix/postfix, 3 atom.
std::string expr_str(const ExprP& m, int prec) {
  switch (m->tag) {
    case ExprTag::Var:
    case ExprTag::Fun: return m->name;
    case ExprTag::Unit: return "()@" + type_str(m->ty, 4);
    case ExprTag::Int: return std::to_string(m->n) + "@" + type_str(m->ty, 4);
    case ExprTag::Str: return quote(m->str) + "@" + type_str(m->ty, 4);
    case ExprTag::Lam: {
      std::string via;
      if (m->rho_auto) via = " via auto";
      else if (!m->rho.empty()) via = " via " + print_set(m->rho);
      return paren(prec > 0, "\\" + m->name + ":" + type_str(m->ty, 0) + via + ". " + expr_str(m->a, 0));
    }
    case ExprTag::TLam:
      return paren(prec > 0, "/\\" + m->name + "::" + kind_str(m->kind, false) + ". " + expr_str(m->a, 0));
    case ExprTag::App:
      if (m->a->tag == ExprTag::Lam && m->a->rho_auto) {
        auto& lam = m->a;
        return paren(prec > 0, "let " + lam->name + " : " + type_str(lam->ty, 0) + " = " + expr_str(m->b, 0) +
                                   " in " + expr_str(lam->a, 0));
      }
      return paren(prec > 1, expr_str(m->a, 1) + " " + expr_str(m->b, 2));
    case ExprTag::TApp:
      return paren(prec > 2, expr_str(m->a, m->a->tag == ExprTag::TApp ? 2 : 3) + " [" + type_str(m->ty, 0) + "]");
    case ExprTag::Inl:
    case ExprTag::Inr:
      return paren(prec > 2, std::string(m->tag == ExprTag::Inl ? "inl[" : "inr[") + type_str(m->ty, 0) + "] " +
                                 expr_str(m->a, 2));
    case ExprTag::Fst: return paren(prec > 2, "fst " + expr_str(m->a, 2));
    case ExprTag::Snd: return paren(prec > 2, "snd " + expr_str(m->a, 2));
    case ExprTag::Pair: return "(" + expr_str(m->a, 0) + ", " + expr_str(m->b, 0) + ")";
    case ExprTag::Com:
      return "com[" + type_str(m->ty, 0) + "] " + type_str(m->src, 4) + " " + type_str(m->dst, 4);
    case ExprTag::Select:
      return paren(prec > 0, "select " + type_str(m->src, 4) + " " + type_str(m->dst, 4) + " " + m->name + "; " +
                                 expr_str(m->a, 0));
    case ExprTag::Case: {
      if (is_if_sugar(m))
        return paren(prec > 0, "if " + expr_str(m->a, 0) + " then " + expr_str(m->b, 0) + " else " +
                                   expr_str(m->c, 0));
      std::string left = open_ended(m->b) ? "(" + expr_str(m->b, 0) + ")" : expr_str(m->b, 0);
      return paren(prec > 0, "case " + expr_str(m->a, 0) + " of inl " + m->name + " => " + left + " | inr " +
                                 m->name2 + " => " + expr_str(m->c, 0));
    }
  }
  return "?";
}

std::string ltype_str(const LTypeP& t, int prec) {
  switch (t->tag) {
    case LTypeTag::Var:
    case LTypeTag::Proc: return t->name;
    case LTypeTag::Unit: return "Unit";
    case LTypeTag::Int: return "Int";
    case LTypeTag::Str: return "String";
    case LTypeTag::Bot: return "⊥";
    case LTypeTag::Sum: return paren(prec > 1, ltype_str(t->a, 1) + " + " + ltype_str(t->b, 2));
    case LTypeTag::Prod: return paren(prec > 2, ltype_str(t->a, 2) + " * " + ltype_str(t->b, 3));
    case LTypeTag::App: return paren(prec > 3, ltype_str(t->a, 3) + " " + ltype_str(t->b, 4));
    case LTypeTag::Arrow: return paren(prec > 0, ltype_str(t->a, 1) + " -> " + ltype_str(t->b, 0));
    case LTypeTag::Forall: return paren(prec > 0, "forall " + t->name + ". " + ltype_str(t->a, 0));
    case LTypeTag::TLam: return paren(prec > 0, "fn " + t->name + " => " + ltype_str(t->a, 0));
    case LTypeTag::AmI:
      return paren(prec > 0, "ami " + ltype_str(t->a, 4) + " then " + ltype_str(t->b, 0) + " else " +
                                 ltype_str(t->c, 0));
  }
  return "?";
}

bool lopen_ended(const LExprP& m) {
  switch (m->tag) {
    case LExprTag::Lam:
    case LExprTag::TLam:
    case LExprTag::Case:
    case LExprTag::Choose:
    case LExprTag::AmI: return true;
    default: return false;
  }
}

std::string lexpr_str(const LExprP& m, int prec) {
  switch (m->tag) {
    case LExprTag::Var:
    case LExprTag::Fun: return m->name;
    case LExprTag::Unit: return "()";
    case LExprTag::Int: return std::to_string(m->n);
    case LExprTag::Str: return quote(m->str);
    case LExprTag::Bot: return "⊥";
    case LExprTag::Hole: return "<hole>";
    case LExprTag::Lam:
      return paren(prec > 0, "\\" + m->name + ":" + ltype_str(m->ty, 0) + ". " + lexpr_str(m->a, 0));
    case LExprTag::TLam: return paren(prec > 0, "/\\" + m->name + ". " + lexpr_str(m->a, 0));
    case LExprTag::App: return paren(prec > 1, lexpr_str(m->a, 1) + " " + lexpr_str(m->b, 2));
    case LExprTag::TApp:
      return paren(prec > 2, lexpr_str(m->a, m->a->tag == LExprTag::TApp ? 2 : 3) + " [" + ltype_str(m->ty, 0) + "]");
    case LExprTag::Inl:
    case LExprTag::Inr:
      return paren(prec > 2, std::string(m->tag == LExprTag::Inl ? "inl[" : "inr[") + ltype_str(m->ty, 0) + "] " +
                                 lexpr_str(m->a, 2));
    case LExprTag::Fst: return paren(prec > 2, "fst " + lexpr_str(m->a, 2));
    case LExprTag::Snd: return paren(prec > 2, "snd " + lexpr_str(m->a, 2));
    case LExprTag::Pair: return "(" + lexpr_str(m->a, 0) + ", " + lexpr_str(m->b, 0) + ")";
    case LExprTag::Send: return "send[" + ltype_str(m->who, 0) + "]";
    case LExprTag::Recv: return "recv[" + ltype_str(m->who, 0) + "]";
    case LExprTag::Sub: return "sub[" + ltype_str(m->who, 0) + " := " + ltype_str(m->who2, 0) + "]";
    case LExprTag::Offer: {
      std::string s = "offer[" + ltype_str(m->who, 0) + "]{";
      bool first = true;
      for (auto& [l, br] : m->branches) {
        if (!first) s += ", ";
        s += l + ": " + lexpr_str(br, 0);
        first = false;
      }
      return s + "}";
    }
    case LExprTag::Choose:
      return paren(prec > 0, "choose[" + ltype_str(m->who, 0) + "] " + m->name + "; " + lexpr_str(m->a, 0));
    case LExprTag::AmI: {
      std::string then = lopen_ended(m->a) && m->a->tag == LExprTag::AmI ? "(" + lexpr_str(m->a, 0) + ")"
                                                                       : lexpr_str(m->a, 0);
      return paren(prec > 0, "ami " + ltype_str(m->who, 4) + " then " + then + " else " + lexpr_str(m->b, 0));
    }
    case LExprTag::Case: {
      std::string left = lopen_ended(m->b) ? "(" + lexpr_str(m->b, 0) + ")" : lexpr_str(m->b, 0);
      return paren(prec > 0, "case " + lexpr_str(m->a, 0) + " of inl " + m->name + " => " + left + " | inr " +
                                 m->name2 + " => " + lexpr_str(m->c, 0));
    }
  }
  return "?";
}

}  // namespace

std::string print(const KindP& k) { return kind_str(k, false); }
std::string print(const TypeP& t) { return type_str(t, 0); }
std::string print(const ExprP& m) { return expr_str(m, 0); }
std::string print(const LTypeP& t) { return ltype_str(t, 0); }
std::string print(const LExprP& m) { return lexpr_str(m, 0); }

std::string print_program(const SourceUnit& u) {
  std::ostringstream out;
  out << "processes ";
  for (std::size_t i = 0; i < u.processes.size(); ++i) out << (i ? ", " : "") << u.processes[i];
  out << ";\n\n";
  for (auto& name : u.def_order) {
    const Def& d = u.defs.at(name);
    out << "def " << name << " : " << print(d.sig) << " =\n  " << print(d.body) << ";\n\n";
  }
  out << "main =\n  " << print(u.main) << ";\n";
  return out.str();
}

}  // namespace polychor
