#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polychor/local.hpp"

namespace polychor {

struct LocalLabel {
  enum class Kind { Tau, Iam, Send, Recv, Choose, Offer } kind = Kind::Tau;
  std::string peer;  // Iam: the executing process; Send/Recv/Choose/Offer: the partner
  LExprP value;      // Send: value sent; Recv: value held
  std::string label; // Choose/Offer
  std::string rule;
};

// For Send/Recv the successor contains a Hole standing for the value obtained
// at synchronization time.
struct LocalStep {
  LocalLabel label;
  LExprP next;
};

std::vector<LocalStep> local_transitions(const std::string& self, const LExprP& l, const LDefs& d);

using Network = std::map<std::string, LExprP>;

struct NetLabel {
  enum class Kind { Tau, Iam, Com, Sel } kind = Kind::Tau;
  std::vector<std::string> participants;  // one, or two sorted names
  std::string detail;
};

struct NetStep {
  NetLabel label;
  Network next;
};

// Where the role substitution [q:=p] lands in a communication from q to p.
// Rename: the receiver gets the sent value renamed. Verbatim: the receiver gets
// the sent value as is, which only matches when it does not mention q.
enum class ComRule { Rename, Verbatim };

std::vector<NetStep> net_transitions(const Network& n, const LDefs& d, ComRule rule = ComRule::Rename);

std::optional<LExprP> merge(const LExprP& a, const LExprP& b);
bool branching_geq(const LExprP& a, const LExprP& b);
// Pointwise over the union of domains; a missing entry counts as bottom.
bool network_geq(const Network& a, const Network& b);

// Replaces every application of bottom by its argument. Such
// a wrapper only waits for its argument to finish and then takes one NBot step.
LExprP strip_bottom_apps(const LExprP& l);
Network strip_bottom_apps(const Network& n);

bool all_values(const Network& n);
std::string network_canon(const Network& n);
std::uint64_t fnv1a64(const std::string& s);
std::uint64_t network_hash(const Network& n);
std::string print_network(const Network& n);

enum class Policy { Random, RoundRobin };

struct RunResult {
  enum class Kind { AllValues, Deadlock, Timeout } kind;
  Network final;
  std::vector<NetLabel> labels;
  std::vector<std::uint64_t> hashes;  // hash of the state after each step
  std::int64_t steps = 0;
};

RunResult run_network(const Network& n, const LDefs& d, Policy policy, std::uint64_t seed, std::int64_t fuel);

const char* to_string(RunResult::Kind k);
const char* to_string(NetLabel::Kind k);

}  // namespace polychor
