// Serial reference explorer against the OpenMP one on the same networks.

#include <benchmark/benchmark.h>

#include "polychor/correspondence.hpp"
#include "polychor/syntax.hpp"
#include "support.hpp"

using namespace polychor;

namespace {

struct Subject {
  CheckedUnit unit;
  LDefs ldefs;
  Network root;
};

Subject corpus_subject(const std::string& name) {
  Subject s{testkit::load_checked(name), {}, {}};
  Correspondence c(s.unit);
  s.ldefs = c.ldefs;
  s.root = c.project(s.unit.main->expr);
  return s;
}

// `pairs` independent process pairs, each bouncing an integer `rounds` times.
// Their interleavings make the state space a product of the pairs' progress.
std::string relay_program(int pairs, int rounds) {
  std::string procs, main;
  for (int i = 0; i < pairs; ++i) {
    std::string a = "P" + std::to_string(i), b = "Q" + std::to_string(i);
    procs += (i ? ", " : "") + a + ", " + b;
    std::string m = "1@" + a;
    for (int r = 0; r < rounds; ++r) {
      const std::string& from = r % 2 ? b : a;
      const std::string& to = r % 2 ? a : b;
      m = "com[fn Z::proc => Int@Z] " + from + " " + to + " (" + m + ")";
    }
    main = i ? "(" + main + ", " + m + ")" : m;
  }
  return "processes " + procs + ";\nmain = " + main + ";\n";
}

Subject relay_subject(int pairs, int rounds) {
  Subject s{check_unit(parse_program(relay_program(pairs, rounds))), {}, {}};
  Correspondence c(s.unit);
  s.ldefs = c.ldefs;
  s.root = c.project(s.unit.main->expr);
  return s;
}

template <StateGraph (*Explore)(const Network&, const LDefs&, const ExploreConfig&)>
void run(benchmark::State& state, const Subject& s) {
  ExploreConfig cfg;
  cfg.depth = static_cast<int>(state.range(0));
  std::size_t states = 0;
  for (auto _ : state) {
    StateGraph g = Explore(s.root, s.ldefs, cfg);
    states = g.states.size();
    benchmark::DoNotOptimize(g.transitions);
  }
  state.counters["states"] = static_cast<double>(states);
}

const Subject& two_buyer() {
  static const Subject s = corpus_subject("two_buyer");
  return s;
}

const Subject& relay() {
  static const Subject s = relay_subject(4, 6);
  return s;
}

void BM_TwoBuyerSerial(benchmark::State& st) { run<explore_serial>(st, two_buyer()); }
void BM_TwoBuyerParallel(benchmark::State& st) { run<explore_parallel>(st, two_buyer()); }
void BM_RelaySerial(benchmark::State& st) { run<explore_serial>(st, relay()); }
void BM_RelayParallel(benchmark::State& st) { run<explore_parallel>(st, relay()); }

}  // namespace

BENCHMARK(BM_TwoBuyerSerial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TwoBuyerParallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RelaySerial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RelayParallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
