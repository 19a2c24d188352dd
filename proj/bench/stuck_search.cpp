// Serial versus level-parallel stuck search on characteristic sessions of
// growing width, plus the looping adder fixture.

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "mpst/characteristic.hpp"
#include "mpst/runtime.hpp"
#include "mpst/text.hpp"

using namespace mpst;

namespace {

// A union of `width` outputs, each continuing with `depth` more rounds.
// The counterexample against a narrower supertype explores every branch.
TypePtr wide(int width, int depth) {
  TypePtr t = SessionType::end();
  for (int d = 0; d < depth; ++d) {
    std::vector<TypeBranch> branches;
    for (int w = 0; w < width; ++w) branches.push_back({"l" + std::to_string(w), Sort::Nat, t});
    t = SessionType::union_of(d % 2 ? "q" : "r", std::move(branches));
  }
  return t;
}

SessionState wide_session(int width, int depth) {
  TypePtr t = wide(width, depth);
  return SessionState::from(counterexample_session(t, t, fresh_participant(t, t)));
}

SessionState adder() {
  std::ifstream in(std::string(MPST_FIXTURE_DIR) + "/adder.mps");
  std::stringstream ss;
  ss << in.rdbuf();
  return SessionState::from(parse_session(ss.str()));
}

template <StuckReport (*Search)(const SessionState&, std::size_t)>
void BM_Wide(benchmark::State& state) {
  SessionState init = wide_session(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  std::size_t discovered = 0;
  for (auto _ : state) {
    StuckReport r = Search(init, 1'000'000);
    discovered = r.discovered;
    benchmark::DoNotOptimize(r);
  }
  state.counters["states"] = static_cast<double>(discovered);
}

template <StuckReport (*Search)(const SessionState&, std::size_t)>
void BM_Adder(benchmark::State& state) {
  SessionState init = adder();
  for (auto _ : state) benchmark::DoNotOptimize(Search(init, 10000));
}

}  // namespace

BENCHMARK_TEMPLATE(BM_Wide, stuck_search_serial)->ArgsProduct({{2, 3, 4}, {2, 3, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Wide, stuck_search)->ArgsProduct({{2, 3, 4}, {2, 3, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Adder, stuck_search_serial)->Unit(benchmark::kMicrosecond);
BENCHMARK_TEMPLATE(BM_Adder, stuck_search)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
