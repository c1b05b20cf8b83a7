#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polychor/core.hpp"

namespace polychor {

struct StepResult {
  enum class Kind { Stepped, Value, Stuck } kind;
  ExprP next;        // Stepped: the reduct; Value: the input
  std::string rule;  // Stepped: rule name of the outermost rule used
  ExprP redex;       // Stepped: the contracted sub-term; Stuck: the offending sub-term
  ExprP contractum;  // Stepped: what the redex became
  std::string reason;  // Stuck
};

// One call-by-value step, left to right.
StepResult step(const ExprP& m, const Defs& d);

struct TraceStep {
  std::string rule;
  ExprP redex, contractum, after;
};

struct EvalResult {
  enum class Kind { Value, Timeout, Stuck } kind;
  ExprP final;
  std::vector<TraceStep> trace;  // filled only when requested
  std::int64_t steps = 0;
  std::string reason;
};

EvalResult eval(const ExprP& m, const Defs& d, std::int64_t fuel, bool keep_trace = false);

// Removes every select node, keeping its continuation.
ExprP erase_selects(const ExprP& m);

}  // namespace polychor
