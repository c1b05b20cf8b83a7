#include "polychor/correspondence.hpp"

#include <omp.h>

#include <algorithm>
#include <deque>
#include <mutex>
#include <unordered_map>

#include "polychor/eval.hpp"
#include "polychor/projection.hpp"

namespace polychor {

const char* to_string(CheckResult::Status s) {
  switch (s) {
    case CheckResult::Status::Pass: return "pass";
    case CheckResult::Status::Violation: return "violation";
    case CheckResult::Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string check_transition_lemmas(const Network& from, const NetStep& step, const LDefs& d, ComRule rule) {
  const auto& ps = step.label.participants;
  auto involved = [&](const std::string& q) { return std::find(ps.begin(), ps.end(), q) != ps.end(); };
  for (auto& [q, l] : from) {
    if (involved(q)) continue;
    auto it = step.next.find(q);
    if (it == step.next.end() || (it->second != l && !lalpha_eq(it->second, l)))
      return "frame: " + q + " changed during " + step.label.detail;
  }
  // Dropping every process outside the label must leave the same step available.
  Network small, small_next;
  for (auto& q : ps) {
    small[q] = from.at(q);
    small_next[q] = step.next.at(q);
  }
  std::string want = network_canon(small_next);
  for (auto& s : net_transitions(small, d, rule))
    if (s.label.kind == step.label.kind && s.label.participants == ps && s.label.detail == step.label.detail &&
        network_canon(s.next) == want)
      return "";
  return "restriction: " + step.label.detail + " is not available once other processes are removed";
}

namespace {

void note_lemmas(LemmaReport& r, const std::string& failure) {
  ++r.transitions_checked;
  if (failure.empty()) return;
  if (failure.rfind("frame", 0) == 0) ++r.frame_violations;
  else ++r.restriction_violations;
  if (r.first_violation.empty()) r.first_violation = failure;
}

std::uint32_t add_state(StateGraph& g, Network n, std::string canon, int depth, std::int64_t parent,
                        const NetLabel& label) {
  g.states.push_back(std::move(n));
  g.canon.push_back(std::move(canon));
  g.depth.push_back(depth);
  g.succ.emplace_back();
  g.expanded.push_back(false);
  g.stuck.push_back(false);
  g.parent.push_back(parent);
  g.parent_label.push_back(label);
  return static_cast<std::uint32_t>(g.states.size() - 1);
}

}  // namespace

StateGraph explore_serial(const Network& root, const LDefs& d, const ExploreConfig& cfg) {
  StateGraph g;
  std::unordered_map<std::string, std::uint32_t> seen;
  std::string rc = network_canon(root);
  seen.emplace(rc, 0);
  add_state(g, root, rc, 0, -1, {});
  std::deque<std::uint32_t> queue{0};
  while (!queue.empty()) {
    std::uint32_t i = queue.front();
    queue.pop_front();
    auto steps = net_transitions(g.states[i], d, cfg.com_rule);
    g.stuck[i] = steps.empty();
    if (g.depth[i] >= cfg.depth) {
      if (!steps.empty()) g.truncated = true;
      continue;
    }
    g.expanded[i] = true;
    for (auto& s : steps) {
      ++g.transitions;
      if (cfg.check_lemmas) note_lemmas(g.lemmas, check_transition_lemmas(g.states[i], s, d, cfg.com_rule));
      std::string c = network_canon(s.next);
      auto it = seen.find(c);
      std::uint32_t j;
      if (it != seen.end()) {
        j = it->second;
      } else {
        if (g.states.size() >= cfg.max_states) {
          g.truncated = true;
          continue;
        }
        j = add_state(g, std::move(s.next), c, g.depth[i] + 1, i, s.label);
        seen.emplace(std::move(c), j);
        queue.push_back(j);
      }
      g.succ[i].push_back(j);
    }
  }
  return g;
}

namespace {

// Reached-state set with per-shard locking.
class ShardedIndex {
 public:
  static constexpr std::size_t kShards = 64;

  // Inserts with an unassigned index; true if the key was absent.
  bool insert(const std::string& key, std::uint64_t h) {
    Shard& s = shards_[h % kShards];
    std::lock_guard<std::mutex> lock(s.mu);
    return s.map.emplace(key, kUnassigned).second;
  }
  void assign(const std::string& key, std::uint64_t h, std::uint32_t idx) {
    Shard& s = shards_[h % kShards];
    std::lock_guard<std::mutex> lock(s.mu);
    s.map[key] = idx;
  }
  std::uint32_t find(const std::string& key, std::uint64_t h) {
    Shard& s = shards_[h % kShards];
    std::lock_guard<std::mutex> lock(s.mu);
    auto it = s.map.find(key);
    return it == s.map.end() ? kUnassigned : it->second;
  }
  static constexpr std::uint32_t kUnassigned = 0xffffffffu;

 private:
  struct Shard {
    std::mutex mu;
    std::unordered_map<std::string, std::uint32_t> map;
  };
  Shard shards_[kShards];
};

struct Candidate {
  std::string canon;
  std::uint64_t hash;
  Network net;
  std::uint32_t parent;
  NetLabel label;
};

struct Expansion {
  std::vector<NetStep> steps;
  std::vector<std::string> canon;
  std::vector<std::uint64_t> hash;
  LemmaReport lemmas;
  std::vector<Candidate> fresh;
};

}  // namespace

StateGraph explore_parallel(const Network& root, const LDefs& d, const ExploreConfig& cfg) {
  StateGraph g;
  ShardedIndex index;
  std::string rc = network_canon(root);
  std::uint64_t rh = fnv1a64(rc);
  index.insert(rc, rh);
  index.assign(rc, rh, 0);
  add_state(g, root, rc, 0, -1, {});

  std::vector<std::uint32_t> level{0};
  for (int depth = 0; !level.empty(); ++depth) {
    std::vector<Expansion> work(level.size());
    const bool expand = depth < cfg.depth;

#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t k = 0; k < level.size(); ++k) {
      std::uint32_t i = level[k];
      Expansion& e = work[k];
      e.steps = net_transitions(g.states[i], d, cfg.com_rule);
      if (!expand) continue;
      for (auto& s : e.steps) {
        if (cfg.check_lemmas) note_lemmas(e.lemmas, check_transition_lemmas(g.states[i], s, d, cfg.com_rule));
        std::string c = network_canon(s.next);
        std::uint64_t h = fnv1a64(c);
        if (index.insert(c, h)) e.fresh.push_back({c, h, s.next, i, s.label});
        e.canon.push_back(std::move(c));
        e.hash.push_back(h);
      }
    }

    // Number new states in canonical order so indices do not depend on scheduling.
    std::vector<Candidate> fresh;
    for (std::size_t k = 0; k < level.size(); ++k) {
      std::uint32_t i = level[k];
      g.stuck[i] = work[k].steps.empty();
      if (!expand) {
        if (!work[k].steps.empty()) g.truncated = true;
        continue;
      }
      g.expanded[i] = true;
      g.transitions += work[k].steps.size();
      auto& L = work[k].lemmas;
      g.lemmas.transitions_checked += L.transitions_checked;
      g.lemmas.frame_violations += L.frame_violations;
      g.lemmas.restriction_violations += L.restriction_violations;
      if (g.lemmas.first_violation.empty()) g.lemmas.first_violation = L.first_violation;
      for (auto& c : work[k].fresh) fresh.push_back(std::move(c));
    }
    std::sort(fresh.begin(), fresh.end(), [](const Candidate& a, const Candidate& b) { return a.canon < b.canon; });

    // The first discoverer in level order is the BFS parent, as in the serial explorer.
    std::unordered_map<std::string, std::pair<std::uint32_t, NetLabel>> first_parent;
    if (expand) {
      for (std::size_t k = 0; k < level.size(); ++k)
        for (std::size_t t = 0; t < work[k].canon.size(); ++t)
          first_parent.try_emplace(work[k].canon[t], level[k], work[k].steps[t].label);
    }

    std::vector<std::uint32_t> next_level;
    for (auto& c : fresh) {
      if (g.states.size() >= cfg.max_states) {
        g.truncated = true;
        break;
      }
      auto& fp = first_parent.at(c.canon);
      std::uint32_t j = add_state(g, std::move(c.net), c.canon, depth + 1, fp.first, fp.second);
      index.assign(c.canon, c.hash, j);
      next_level.push_back(j);
    }

    if (expand) {
#pragma omp parallel for schedule(static)
      for (std::size_t k = 0; k < level.size(); ++k) {
        auto& succ = g.succ[level[k]];
        for (std::size_t t = 0; t < work[k].canon.size(); ++t) {
          std::uint32_t j = index.find(work[k].canon[t], work[k].hash[t]);
          if (j != ShardedIndex::kUnassigned) succ.push_back(j);
        }
      }
    }
    level = std::move(next_level);
  }
  return g;
}

std::vector<std::string> trace_to(const StateGraph& g, std::uint32_t i) {
  std::vector<std::string> out;
  for (std::int64_t k = i; k > 0; k = g.parent[k]) out.push_back(g.parent_label[k].detail);
  std::reverse(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- theorem checks

Correspondence::Correspondence(const CheckedUnit& u)
    : unit(u), ldefs(project_defs(u)), domain(network_domain(u.main)) {}

Network Correspondence::project(const ExprP& m) const {
  TypedP t = type_of(unit.main_ctx, m);
  Network n;
  for (auto& p : domain) n[p] = project_expr(t, p);
  return n;
}

std::vector<ExprP> Correspondence::chor_trace(bool* timed_out) const {
  std::vector<ExprP> out{unit.main->expr};
  if (timed_out) *timed_out = false;
  for (std::int64_t k = 0;; ++k) {
    StepResult s = step(out.back(), unit.unit.defs);
    if (s.kind != StepResult::Kind::Stepped) break;
    if (k >= fuel) {
      if (timed_out) *timed_out = true;
      break;
    }
    out.push_back(s.next);
  }
  return out;
}

CheckResult Correspondence::completeness(int bound, bool up_to_bottom_apps) const {
  CheckResult r;
  r.theorem = "completeness";
  if (bound < 0) bound = default_bound(domain.size());
  auto view = [&](const Network& n) { return up_to_bottom_apps ? strip_bottom_apps(n) : n; };
  bool timed_out = false;
  auto trace = chor_trace(&timed_out);
  Network cur = project(trace.front());
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    Network target = view(project(trace[i + 1]));
    // Breadth-first search for N with cur ->* N and N ⊒ target.
    std::unordered_map<std::string, int> seen{{network_canon(cur), 0}};
    std::deque<std::pair<Network, int>> queue{{cur, 0}};
    bool found = false, cut = false;
    while (!queue.empty() && !found) {
      auto [n, depth] = std::move(queue.front());
      queue.pop_front();
      ++r.states;
      if (network_geq(view(n), target)) {
        cur = std::move(n);
        found = true;
        break;
      }
      if (depth >= bound) {
        if (!net_transitions(n, ldefs).empty()) cut = true;
        continue;
      }
      for (auto& s : net_transitions(n, ldefs)) {
        note_lemmas(r.lemmas, check_transition_lemmas(n, s, ldefs));
        std::string c = network_canon(s.next);
        if (seen.emplace(c, depth + 1).second) queue.emplace_back(std::move(s.next), depth + 1);
      }
    }
    ++r.steps;
    if (!found) {
      r.status = cut ? CheckResult::Status::Inconclusive : CheckResult::Status::Violation;
      r.detail = std::string(cut ? "bound exhausted" : "no matching network") + " at choreography step " +
                 std::to_string(i) + " (bound " + std::to_string(bound) + ")";
      r.witness = {print(trace[i]), print(trace[i + 1]), print_network(cur)};
      return r;
    }
  }
  if (timed_out) {
    r.status = CheckResult::Status::Inconclusive;
    r.detail = "choreography did not reach a value within the fuel limit";
  }
  if (r.lemmas.frame_violations || r.lemmas.restriction_violations) {
    r.status = CheckResult::Status::Violation;
    r.detail = r.lemmas.first_violation;
  }
  return r;
}

CheckResult soundness_check(const Network& root, const std::vector<Network>& targets, const LDefs& d, int depth,
                            int join_bound, bool parallel, bool chor_timed_out) {
  CheckResult r;
  r.theorem = "soundness";
  ExploreConfig cfg;
  cfg.depth = depth + join_bound;
  StateGraph g = parallel ? explore_parallel(root, d, cfg) : explore_serial(root, d, cfg);
  r.states = g.states.size();
  r.steps = targets.empty() ? 0 : targets.size() - 1;
  r.lemmas = g.lemmas;

  const std::size_t n = g.states.size();
  std::vector<char> joins(n, 0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < n; ++i)
    for (auto& t : targets)
      if (network_geq(g.states[i], t)) {
        joins[i] = 1;
        break;
      }
  // A state joins if it can reach a joining state.
  std::vector<std::vector<std::uint32_t>> pred(n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (auto j : g.succ[i]) pred[j].push_back(i);
  std::deque<std::uint32_t> queue;
  for (std::uint32_t i = 0; i < n; ++i)
    if (joins[i]) queue.push_back(i);
  while (!queue.empty()) {
    auto j = queue.front();
    queue.pop_front();
    for (auto i : pred[j])
      if (!joins[i]) {
        joins[i] = 1;
        queue.push_back(i);
      }
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    if (g.depth[i] > depth || joins[i]) continue;
    r.status = g.truncated || chor_timed_out ? CheckResult::Status::Inconclusive : CheckResult::Status::Violation;
    r.detail = "state at depth " + std::to_string(g.depth[i]) + " joins no projected reduct";
    r.witness = trace_to(g, i);
    r.witness.push_back(print_network(g.states[i]));
    return r;
  }
  if (g.lemmas.frame_violations || g.lemmas.restriction_violations) {
    r.status = CheckResult::Status::Violation;
    r.detail = g.lemmas.first_violation;
  }
  return r;
}

CheckResult Correspondence::soundness(int depth, int join_bound, bool parallel) const {
  if (join_bound < 0) join_bound = default_bound(domain.size());
  bool timed_out = false;
  auto trace = chor_trace(&timed_out);
  std::vector<Network> targets;
  targets.reserve(trace.size());
  for (auto& m : trace) targets.push_back(project(m));
  return soundness_check(targets.front(), targets, ldefs, depth, join_bound, parallel, timed_out);
}

CheckResult deadlock_check(const Network& root, const LDefs& d, int depth, bool parallel) {
  CheckResult r;
  r.theorem = "deadlock";
  ExploreConfig cfg;
  cfg.depth = depth;
  StateGraph g = parallel ? explore_parallel(root, d, cfg) : explore_serial(root, d, cfg);
  r.states = g.states.size();
  r.lemmas = g.lemmas;
  for (std::uint32_t i = 0; i < g.states.size(); ++i) {
    if (g.stuck[i] && !all_values(g.states[i])) {
      r.status = CheckResult::Status::Violation;
      r.detail = "deadlocked state at depth " + std::to_string(g.depth[i]);
      r.witness = trace_to(g, i);
      r.witness.push_back(print_network(g.states[i]));
      return r;
    }
  }
  if (g.lemmas.frame_violations || g.lemmas.restriction_violations) {
    r.status = CheckResult::Status::Violation;
    r.detail = g.lemmas.first_violation;
  }
  return r;
}

CheckResult Correspondence::deadlock_freedom(int depth, bool parallel) const {
  return deadlock_check(project(unit.main->expr), ldefs, depth, parallel);
}

}  // namespace polychor
