#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "polychor/core.hpp"
#include "polychor/local.hpp"

namespace polychor {

struct Span {
  int line = 0, col = 0;
};

struct ParseError : std::runtime_error {
  Span at;
  ParseError(const std::string& msg, Span s)
      : std::runtime_error(std::to_string(s.line) + ":" + std::to_string(s.col) + ": " + msg), at(s) {}
};

struct SourceUnit {
  std::vector<std::string> processes;  // declaration order
  ProcSet universe;
  Defs defs;
  std::vector<std::string> def_order;
  ExprP main;
  std::map<const Expr*, Span> spans;
};

SourceUnit parse_program(const std::string& text);

// Fragments. Identifiers in `universe` read as process names; with `allow_free`
// unknown identifiers in type position become type variables instead of errors.
ExprP parse_expr(const std::string& text, const ProcSet& universe,
                 const std::set<std::string>& def_names = {}, bool allow_free = true);
TypeP parse_type(const std::string& text, const ProcSet& universe, bool allow_free = true);
KindP parse_kind(const std::string& text, const ProcSet& universe);

LExprP parse_local(const std::string& text, const ProcSet& universe,
                   const std::set<std::string>& def_names = {});
LTypeP parse_ltype(const std::string& text, const ProcSet& universe);

std::string print(const KindP& k);
std::string print(const TypeP& t);
std::string print(const ExprP& m);
std::string print(const LTypeP& t);
std::string print(const LExprP& m);
std::string print_program(const SourceUnit& u);
std::string print_set(const ProcSet& s);

}  // namespace polychor
