#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polychor/network.hpp"
#include "polychor/typecheck.hpp"

namespace polychor {

struct ExploreConfig {
  int depth = 8;                     // states at this depth are not expanded
  std::size_t max_states = 2000000;  // hard cap; hitting it marks the graph truncated
  bool check_lemmas = true;          // frame and restriction checks on every transition
  ComRule com_rule = ComRule::Rename;
};

struct LemmaReport {
  std::uint64_t transitions_checked = 0;
  std::uint64_t frame_violations = 0;
  std::uint64_t restriction_violations = 0;
  std::string first_violation;
};

struct StateGraph {
  std::vector<Network> states;
  std::vector<std::string> canon;
  std::vector<int> depth;
  std::vector<std::vector<std::uint32_t>> succ;  // empty for unexpanded states
  std::vector<bool> expanded;
  std::vector<bool> stuck;   // no transitions at all
  std::vector<std::int64_t> parent;
  std::vector<NetLabel> parent_label;
  bool truncated = false;    // some state with transitions was left unexpanded
  std::uint64_t transitions = 0;
  LemmaReport lemmas;
};

// Breadth-first reference explorer.
StateGraph explore_serial(const Network& root, const LDefs& d, const ExploreConfig& cfg);
// Level-synchronous OpenMP explorer; same states, depths and edges as the serial one.
// States within a level are ordered by canonical form, so results do not depend on thread count.
StateGraph explore_parallel(const Network& root, const LDefs& d, const ExploreConfig& cfg);

// Labels along the BFS tree from the root to state i.
std::vector<std::string> trace_to(const StateGraph& g, std::uint32_t i);

// Frame and restriction checks for one transition; returns a description of the failure or "".
std::string check_transition_lemmas(const Network& from, const NetStep& step, const LDefs& d,
                                    ComRule rule = ComRule::Rename);

struct CheckResult {
  std::string theorem;
  enum class Status { Pass, Violation, Inconclusive } status = Status::Pass;
  std::string detail;
  std::vector<std::string> witness;
  std::uint64_t states = 0;
  std::uint64_t steps = 0;
  LemmaReport lemmas;
};

const char* to_string(CheckResult::Status s);

inline int default_bound(std::size_t processes) { return static_cast<int>(2 * processes + 4); }

// The choreography M together with everything needed to relate it to networks.
struct Correspondence {
  const CheckedUnit& unit;
  LDefs ldefs;
  ProcSet domain;
  std::int64_t fuel = 100000;

  explicit Correspondence(const CheckedUnit& u);
  // Projection of a reduct over the fixed domain of the initial network.
  Network project(const ExprP& m) const;
  // Evaluation trace M0, M1, ... (ends at a value, or at the fuel limit).
  std::vector<ExprP> chor_trace(bool* timed_out = nullptr) const;

  // up_to_bottom_apps compares both sides after strip_bottom_apps. A function
  // whose projection becomes bottom mid-run leaves `⊥ L` where the reduct's
  // projection has plain L; the wrapper resolves with one NBot step once L is done.
  CheckResult completeness(int bound = -1, bool up_to_bottom_apps = false) const;
  CheckResult soundness(int depth, int join_bound = -1, bool parallel = true) const;
  CheckResult deadlock_freedom(int depth, bool parallel = true) const;
};

// Explores from root to depth + join_bound and requires every state within
// depth to reach some network that is ⊒ one of the targets.
CheckResult soundness_check(const Network& root, const std::vector<Network>& targets, const LDefs& d, int depth,
                            int join_bound, bool parallel = true, bool chor_timed_out = false);

CheckResult deadlock_check(const Network& root, const LDefs& d, int depth, bool parallel = true);

}  // namespace polychor
