#pragma once

#include <stdexcept>
#include <string>

#include "polychor/local.hpp"
#include "polychor/network.hpp"
#include "polychor/typecheck.hpp"

namespace polychor {

// Codes: MergeFailure, Unprojectable.
struct ProjectionError : std::runtime_error {
  std::string code;
  const Expr* node;
  ProjectionError(std::string code_, const std::string& msg, const Expr* at = nullptr)
      : std::runtime_error(code_ + ": " + msg), code(std::move(code_)), node(at) {}
};

// Name of the stand-in process used when projecting definitions.
inline const std::string kDefProcess = "$p";

LTypeP project_type(const Ctx& c, const TypeP& t, const std::string& p);
LExprP project_expr(const TypedP& m, const std::string& p);
LDefs project_defs(const CheckedUnit& u);
// Processes of the projected network: roles of the main type plus every process literal.
ProcSet network_domain(const TypedP& main);
Network project_network(const TypedP& main);

}  // namespace polychor
