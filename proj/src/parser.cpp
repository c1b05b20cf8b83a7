#include <cctype>
#include <functional>

#include "polychor/syntax.hpp"

namespace polychor {

namespace {

enum class Tok { Ident, Int, Str, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::int64_t value = 0;
  Span at;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '?' || c == '$';
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto adv = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') { ++line; col = 1; }
      else ++col;
    }
  };
  static const std::vector<std::string> syms = {"/\\", "::", ":=", "=>", "->", "⊥", "(", ")", "[", "]", "{", "}",
                                                ",", ";", ":", ".", "+", "*", "\\", "@", "=", "|"};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) { adv(); continue; }
    if ((c == '/' || c == '-') && i + 1 < src.size() && src[i + 1] == c) {
      while (i < src.size() && src[i] != '\n') adv();
      continue;
    }
    Span at{line, col};
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), 0, at});
      adv(j - i);
      continue;
    }
    bool neg = c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || neg) {
      std::size_t j = i + (neg ? 1 : 0);
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      std::string text = src.substr(i, j - i);
      std::int64_t v;
      try {
        v = std::stoll(text);
      } catch (const std::exception&) {
        throw ParseError("integer literal out of range", at);
      }
      out.push_back({Tok::Int, text, v, at});
      adv(j - i);
      continue;
    }
    if (c == '"') {
      std::string s;
      adv();
      while (true) {
        if (i >= src.size()) throw ParseError("unterminated string literal", at);
        char d = src[i];
        if (d == '"') { adv(); break; }
        if (d == '\\' && i + 1 < src.size()) {
          char e = src[i + 1];
          s += e == 'n' ? '\n' : e == 't' ? '\t' : e;
          adv(2);
          continue;
        }
        s += d;
        adv();
      }
      out.push_back({Tok::Str, s, 0, at});
      continue;
    }
    bool matched = false;
    for (auto& s : syms) {
      if (src.compare(i, s.size(), s) == 0) {
        out.push_back({Tok::Sym, s, 0, at});
        adv(s.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", at);
  }
  out.push_back({Tok::End, "", 0, {line, col}});
  return out;
}

const std::set<std::string> kKeywords = {
    "processes", "def",  "main", "forall", "fn",     "proc",   "let",  "in",   "if",   "then",
    "else",      "case", "of",   "inl",    "inr",    "fst",    "snd",  "com",  "select", "via",
    "auto",      "Int",  "String", "Bool", "Unit",   "send",   "recv", "offer", "choose", "sub",
    "ami",       "bot"};

class Parser {
 public:
  Parser(const std::string& text, ProcSet universe, std::set<std::string> defs, bool allow_free)
      : toks_(lex(text)), universe_(std::move(universe)), defs_(std::move(defs)), allow_free_(allow_free) {}

  std::map<const Expr*, Span> spans;

  // ------------------------------------------------------------ program
  SourceUnit program() {
    SourceUnit u;
    expect_kw("processes");
    do {
      Token t = ident("process name");
      if (t.text.find('\'') != std::string::npos) throw ParseError("process names may not contain '", t.at);
      if (u.universe.count(t.text)) throw ParseError("duplicate process '" + t.text + "'", t.at);
      u.processes.push_back(t.text);
      u.universe.insert(t.text);
    } while (accept(","));
    expect(";");
    universe_ = u.universe;
    // Def names are collected up front so bodies may refer to later defs.
    for (std::size_t k = pos_; k + 1 < toks_.size(); ++k)
      if (toks_[k].kind == Tok::Ident && toks_[k].text == "def" && toks_[k + 1].kind == Tok::Ident)
        defs_.insert(toks_[k + 1].text);
    while (is_kw("def")) {
      next();
      Token name = ident("definition name");
      if (u.defs.count(name.text)) throw ParseError("duplicate definition '" + name.text + "'", name.at);
      expect(":");
      TypeP sig = type();
      expect("=");
      ExprP body = expr();
      expect(";");
      u.defs[name.text] = Def{name.text, sig, body};
      u.def_order.push_back(name.text);
    }
    expect_kw("main");
    expect("=");
    u.main = expr();
    expect(";");
    if (peek().kind != Tok::End) throw ParseError("trailing input after main", peek().at);
    u.spans = std::move(spans);
    return u;
  }

  void finish() {
    if (peek().kind != Tok::End) throw ParseError("unexpected '" + peek().text + "'", peek().at);
  }

  // ------------------------------------------------------------ kinds
  KindP kind() {
    KindP k = kind_noarrow();
    if (accept("=>")) return k_arrow(k, kind());
    return k;
  }

  KindP kind_noarrow() {
    KindP k;
    if (accept("*")) k = k_star();
    else if (accept_kw("proc")) k = k_proc();
    else if (accept("(")) {
      k = kind();
      expect(")");
    } else throw err("expected a kind");
    while (accept("\\")) k = k_without(k, name_set());
    return k;
  }

  ProcSet name_set() {
    ProcSet s;
    expect("{");
    if (!accept("}")) {
      do {
        Token t = ident("process or type variable");
        check_type_ident(t);
        s.insert(t.text);
      } while (accept(","));
      expect("}");
    }
    return s;
  }

  // ------------------------------------------------------------ types
  TypeP type() {
    if (accept_kw("forall")) {
      Token x = binder_tyvar();
      expect("::");
      KindP k = kind();
      expect(".");
      tyscope_.push_back(x.text);
      TypeP body = type();
      tyscope_.pop_back();
      return t_forall(x.text, k, body);
    }
    if (accept_kw("fn")) {
      Token x = binder_tyvar();
      expect("::");
      KindP k = kind_noarrow();
      expect("=>");
      tyscope_.push_back(x.text);
      TypeP body = type();
      tyscope_.pop_back();
      return t_tlam(x.text, k, body);
    }
    TypeP lhs = sum_type();
    if (accept("->")) {
      ProcSet rho;
      if (peek_sym("{")) rho = name_set();
      return t_arrow(lhs, rho, type());
    }
    return lhs;
  }

  TypeP sum_type() {
    TypeP t = prod_type();
    while (accept("+")) t = t_sum(t, prod_type());
    return t;
  }

  TypeP prod_type() {
    TypeP t = app_type();
    while (accept("*")) t = t_prod(t, app_type());
    return t;
  }

  TypeP app_type() {
    TypeP t = atom_type();
    while (starts_type_atom()) t = t_app(t, atom_type());
    return t;
  }

  bool starts_type_atom() {
    const Token& t = peek();
    if (t.kind == Tok::Sym) return t.text == "(";
    if (t.kind != Tok::Ident) return false;
    if (t.text == "Int" || t.text == "String" || t.text == "Bool") return true;
    return !kKeywords.count(t.text);
  }

  TypeP atom_type() {
    Token t = peek();
    if (accept("(")) {
      if (accept(")")) {
        expect("@");
        return t_unit(location());
      }
      TypeP inner = type();
      expect(")");
      return inner;
    }
    if (accept_kw("Int")) { expect("@"); return t_int(location()); }
    if (accept_kw("String")) { expect("@"); return t_str(location()); }
    if (accept_kw("Bool")) { expect("@"); return t_bool(location()); }
    Token id = ident("type");
    return type_ident(id);
  }

  TypeP type_ident(const Token& id) {
    check_type_ident(id);
    if (in_tyscope(id.text)) return t_var(id.text);
    if (universe_.count(id.text)) return t_proc(id.text);
    return t_var(id.text);
  }

  void check_type_ident(const Token& id) {
    if (kKeywords.count(id.text)) throw ParseError("unexpected keyword '" + id.text + "'", id.at);
    if (in_tyscope(id.text) || universe_.count(id.text) || allow_free_) return;
    throw ParseError("unknown process name '" + id.text + "'", id.at);
  }

  TypeP location() {
    Token at = peek();
    TypeP loc = atom_type();
    if (!is_type_value(loc)) throw ParseError("location must be a type value", at.at);
    return loc;
  }

  // ------------------------------------------------------------ terms
  ExprP expr() {
    Token start = peek();
    ExprP e = expr_inner();
    spans.emplace(e.get(), start.at);
    return e;
  }

  ExprP expr_inner() {
    if (accept("\\")) {
      Token x = binder_var();
      expect(":");
      TypeP ann = type();
      ProcSet rho;
      bool automatic = false;
      if (accept_kw("via")) {
        if (accept_kw("auto")) automatic = true;
        else rho = name_set();
      }
      expect(".");
      ExprP body = with_var(x.text, [&] { return expr(); });
      return e_lam(x.text, ann, rho, body, automatic);
    }
    if (accept("/\\")) {
      Token x = binder_tyvar();
      expect("::");
      KindP k = kind();
      expect(".");
      tyscope_.push_back(x.text);
      ExprP body = expr();
      tyscope_.pop_back();
      return e_tlam(x.text, k, body);
    }
    if (accept_kw("let")) {
      Token x = binder_var();
      expect(":");
      TypeP ann = type();
      expect("=");
      ExprP bound = expr();
      expect_kw("in");
      ExprP body = with_var(x.text, [&] { return expr(); });
      return e_app(e_lam(x.text, ann, {}, body, true), bound);
    }
    if (accept_kw("if")) {
      ExprP c = expr();
      expect_kw("then");
      ExprP a = expr();
      expect_kw("else");
      ExprP b = expr();
      std::set<std::string> avoid;
      all_names(a, avoid);
      all_names(b, avoid);
      std::string x;
      for (int k = 0;; ++k) {
        x = "_c" + std::to_string(k);
        if (!avoid.count(x)) break;
      }
      return e_case(c, x, a, x, b);
    }
    if (accept_kw("case")) {
      ExprP scrut = expr();
      expect_kw("of");
      expect_kw("inl");
      Token x = binder_var();
      expect("=>");
      ExprP l = with_var(x.text, [&] { return expr(); });
      expect("|");
      expect_kw("inr");
      Token y = binder_var();
      expect("=>");
      ExprP r = with_var(y.text, [&] { return expr(); });
      return e_case(scrut, x.text, l, y.text, r);
    }
    if (accept_kw("select")) {
      TypeP src = location();
      TypeP dst = location();
      Token lbl = ident("label");
      expect(";");
      return e_select(src, dst, lbl.text, expr());
    }
    return app_expr();
  }

  ExprP app_expr() {
    ExprP e = postfix_expr();
    while (starts_atom()) {
      Token at = peek();
      ExprP arg = postfix_expr();
      e = e_app(e, arg);
      spans.emplace(e.get(), at.at);
    }
    return e;
  }

  bool starts_atom() {
    const Token& t = peek();
    if (t.kind == Tok::Int || t.kind == Tok::Str) return true;
    if (t.kind == Tok::Sym) return t.text == "(";
    if (t.kind != Tok::Ident) return false;
    static const std::set<std::string> starters = {"inl", "inr", "fst", "snd", "com"};
    if (starters.count(t.text)) return true;
    return !kKeywords.count(t.text);
  }

  ExprP postfix_expr() {
    Token start = peek();
    ExprP e = atom_expr();
    spans.emplace(e.get(), start.at);
    while (accept("[")) {
      TypeP t = type();
      expect("]");
      e = e_tapp(e, t);
      spans.emplace(e.get(), start.at);
    }
    return e;
  }

  ExprP atom_expr() {
    Token t = peek();
    if (accept("(")) {
      if (accept(")")) {
        expect("@");
        return e_unit(location());
      }
      ExprP a = expr();
      if (accept(",")) {
        ExprP b = expr();
        expect(")");
        return e_pair(a, b);
      }
      expect(")");
      return a;
    }
    if (t.kind == Tok::Int) {
      next();
      expect("@");
      return e_int(t.value, location());
    }
    if (t.kind == Tok::Str) {
      next();
      expect("@");
      return e_str(t.text, location());
    }
    if (accept_kw("inl") || accept_kw("inr")) {
      bool left = t.text == "inl";
      expect("[");
      TypeP other = type();
      expect("]");
      ExprP m = postfix_expr();
      return left ? e_inl(other, m) : e_inr(other, m);
    }
    if (accept_kw("fst")) return e_fst(postfix_expr());
    if (accept_kw("snd")) return e_snd(postfix_expr());
    if (accept_kw("com")) {
      expect("[");
      TypeP tr = type();
      expect("]");
      TypeP src = location();
      TypeP dst = location();
      return e_com(tr, src, dst);
    }
    Token id = ident("expression");
    if (kKeywords.count(id.text)) throw ParseError("unexpected keyword '" + id.text + "'", id.at);
    if (!in_varscope(id.text) && defs_.count(id.text)) return e_fun(id.text);
    return e_var(id.text);
  }

  // ------------------------------------------------------------ local language
  LTypeP ltype() {
    if (accept_kw("forall")) {
      Token x = binder_tyvar();
      expect(".");
      return lt_forall(x.text, scoped_ty(x.text, [&] { return ltype(); }));
    }
    if (accept_kw("fn")) {
      Token x = binder_tyvar();
      expect("=>");
      return lt_tlam(x.text, scoped_ty(x.text, [&] { return ltype(); }));
    }
    if (accept_kw("ami")) {
      LTypeP who = ltype_atom();
      expect_kw("then");
      LTypeP a = ltype();
      expect_kw("else");
      return lt_ami(who, a, ltype());
    }
    LTypeP lhs = lsum();
    if (accept("->")) return lt_arrow(lhs, ltype());
    return lhs;
  }

  LTypeP lsum() {
    LTypeP t = lprod();
    while (accept("+")) t = lt_sum(t, lprod());
    return t;
  }

  LTypeP lprod() {
    LTypeP t = lapp();
    while (accept("*")) t = lt_prod(t, lapp());
    return t;
  }

  LTypeP lapp() {
    LTypeP t = ltype_atom();
    while (starts_ltype_atom()) t = lt_app(t, ltype_atom());
    return t;
  }

  bool starts_ltype_atom() {
    const Token& t = peek();
    if (t.kind == Tok::Sym) return t.text == "(" || t.text == "⊥";
    if (t.kind != Tok::Ident) return false;
    if (t.text == "Unit" || t.text == "Int" || t.text == "String" || t.text == "bot") return true;
    return !kKeywords.count(t.text);
  }

  LTypeP ltype_atom() {
    if (accept("(")) {
      LTypeP t = ltype();
      expect(")");
      return t;
    }
    if (accept("⊥") || accept_kw("bot")) return lt_bot();
    if (accept_kw("Unit")) return lt_unit();
    if (accept_kw("Int")) return lt_int();
    if (accept_kw("String")) return lt_str();
    Token id = ident("local type");
    if (kKeywords.count(id.text)) throw ParseError("unexpected keyword '" + id.text + "'", id.at);
    if (!in_tyscope(id.text) && universe_.count(id.text)) return lt_proc(id.text);
    return lt_var(id.text);
  }

  LExprP lexpr() {
    if (accept("\\")) {
      Token x = binder_var();
      expect(":");
      LTypeP ann = ltype();
      expect(".");
      return le_lam(x.text, ann, with_var(x.text, [&] { return lexpr(); }));
    }
    if (accept("/\\")) {
      Token x = binder_tyvar();
      expect(".");
      return le_tlam(x.text, scoped_ty(x.text, [&] { return lexpr(); }));
    }
    if (accept_kw("case")) {
      LExprP scrut = lexpr();
      expect_kw("of");
      expect_kw("inl");
      Token x = binder_var();
      expect("=>");
      LExprP l = with_var(x.text, [&] { return lexpr(); });
      expect("|");
      expect_kw("inr");
      Token y = binder_var();
      expect("=>");
      LExprP r = with_var(y.text, [&] { return lexpr(); });
      return le_case(scrut, x.text, l, y.text, r);
    }
    if (accept_kw("choose")) {
      expect("[");
      LTypeP to = ltype();
      expect("]");
      Token lbl = ident("label");
      expect(";");
      return le_choose(to, lbl.text, lexpr());
    }
    if (accept_kw("ami")) {
      LTypeP who = ltype_atom();
      expect_kw("then");
      LExprP a = lexpr();
      expect_kw("else");
      return le_ami(who, a, lexpr());
    }
    LExprP e = lpostfix();
    while (starts_latom()) e = le_app(e, lpostfix());
    return e;
  }

  bool starts_latom() {
    const Token& t = peek();
    if (t.kind == Tok::Int || t.kind == Tok::Str) return true;
    if (t.kind == Tok::Sym) return t.text == "(" || t.text == "⊥";
    if (t.kind != Tok::Ident) return false;
    static const std::set<std::string> starters = {"inl", "inr", "fst", "snd", "send", "recv", "offer", "sub", "bot"};
    if (starters.count(t.text)) return true;
    return !kKeywords.count(t.text);
  }

  LExprP lpostfix() {
    LExprP e = latom();
    while (accept("[")) {
      LTypeP t = ltype();
      expect("]");
      e = le_tapp(e, t);
    }
    return e;
  }

  LExprP latom() {
    Token t = peek();
    if (accept("(")) {
      if (accept(")")) return le_unit();
      LExprP a = lexpr();
      if (accept(",")) {
        LExprP b = lexpr();
        expect(")");
        return le_pair(a, b);
      }
      expect(")");
      return a;
    }
    if (t.kind == Tok::Int) { next(); return le_int(t.value); }
    if (t.kind == Tok::Str) { next(); return le_str(t.text); }
    if (accept("⊥") || accept_kw("bot")) return le_bot();
    if (accept_kw("inl") || accept_kw("inr")) {
      bool left = t.text == "inl";
      expect("[");
      LTypeP other = ltype();
      expect("]");
      LExprP m = lpostfix();
      return left ? le_inl(other, m) : le_inr(other, m);
    }
    if (accept_kw("fst")) return le_fst(lpostfix());
    if (accept_kw("snd")) return le_snd(lpostfix());
    if (accept_kw("send") || accept_kw("recv")) {
      bool send = t.text == "send";
      expect("[");
      LTypeP who = ltype();
      expect("]");
      return send ? le_send(who) : le_recv(who);
    }
    if (accept_kw("sub")) {
      expect("[");
      LTypeP from = ltype();
      expect(":=");
      LTypeP to = ltype();
      expect("]");
      return le_sub(from, to);
    }
    if (accept_kw("offer")) {
      expect("[");
      LTypeP from = ltype();
      expect("]");
      expect("{");
      std::map<std::string, LExprP> brs;
      if (!accept("}")) {
        do {
          Token lbl = ident("label");
          expect(":");
          if (brs.count(lbl.text)) throw ParseError("duplicate offer label '" + lbl.text + "'", lbl.at);
          brs[lbl.text] = lexpr();
        } while (accept(","));
        expect("}");
      }
      return le_offer(from, brs);
    }
    Token id = ident("local expression");
    if (kKeywords.count(id.text)) throw ParseError("unexpected keyword '" + id.text + "'", id.at);
    if (!in_varscope(id.text) && defs_.count(id.text)) return le_fun(id.text);
    return le_var(id.text);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ProcSet universe_;
  std::set<std::string> defs_;
  bool allow_free_;
  std::vector<std::string> tyscope_, varscope_;

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  ParseError err(const std::string& what) const {
    const Token& t = peek();
    return ParseError(what + (t.kind == Tok::End ? " at end of input" : ", found '" + t.text + "'"), t.at);
  }

  bool peek_sym(const std::string& s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool accept(const std::string& s) {
    if (!peek_sym(s)) return false;
    next();
    return true;
  }
  void expect(const std::string& s) {
    if (!accept(s)) throw err("expected '" + s + "'");
  }
  bool is_kw(const std::string& k) const { return peek().kind == Tok::Ident && peek().text == k; }
  bool accept_kw(const std::string& k) {
    if (!is_kw(k)) return false;
    next();
    return true;
  }
  void expect_kw(const std::string& k) {
    if (!accept_kw(k)) throw err("expected '" + k + "'");
  }
  Token ident(const std::string& what) {
    if (peek().kind != Tok::Ident) throw err("expected " + what);
    return next();
  }
  Token binder_var() {
    Token t = ident("variable");
    if (kKeywords.count(t.text)) throw ParseError("keyword '" + t.text + "' used as a variable", t.at);
    return t;
  }
  Token binder_tyvar() {
    Token t = ident("type variable");
    if (kKeywords.count(t.text)) throw ParseError("keyword '" + t.text + "' used as a type variable", t.at);
    if (universe_.count(t.text))
      throw ParseError("type variable '" + t.text + "' clashes with a declared process", t.at);
    return t;
  }
  bool in_tyscope(const std::string& x) const {
    for (auto& y : tyscope_)
      if (y == x) return true;
    return false;
  }
  bool in_varscope(const std::string& x) const {
    for (auto& y : varscope_)
      if (y == x) return true;
    return false;
  }
  template <class F>
  auto with_var(const std::string& x, F&& f) -> decltype(f()) {
    varscope_.push_back(x);
    auto r = f();
    varscope_.pop_back();
    return r;
  }
  template <class F>
  auto scoped_ty(const std::string& x, F&& f) -> decltype(f()) {
    tyscope_.push_back(x);
    auto r = f();
    tyscope_.pop_back();
    return r;
  }
};

}  // namespace

SourceUnit parse_program(const std::string& text) {
  Parser p(text, {}, {}, false);
  return p.program();
}

ExprP parse_expr(const std::string& text, const ProcSet& universe, const std::set<std::string>& def_names,
                 bool allow_free) {
  Parser p(text, universe, def_names, allow_free);
  ExprP e = p.expr();
  p.finish();
  return e;
}

TypeP parse_type(const std::string& text, const ProcSet& universe, bool allow_free) {
  Parser p(text, universe, {}, allow_free);
  TypeP t = p.type();
  p.finish();
  return t;
}

KindP parse_kind(const std::string& text, const ProcSet& universe) {
  Parser p(text, universe, {}, true);
  KindP k = p.kind();
  p.finish();
  return k;
}

LExprP parse_local(const std::string& text, const ProcSet& universe, const std::set<std::string>& def_names) {
  Parser p(text, universe, def_names, true);
  LExprP e = p.lexpr();
  p.finish();
  return e;
}

LTypeP parse_ltype(const std::string& text, const ProcSet& universe) {
  Parser p(text, universe, {}, true);
  LTypeP t = p.ltype();
  p.finish();
  return t;
}

}  // namespace polychor
