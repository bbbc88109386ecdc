// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "keycast/analysis.hpp"
#include "keycast/constructions.hpp"
#include "keycast/feasibility.hpp"
#include "keycast/search.hpp"

using namespace keycast;

namespace {

// Every eavesdrop view and terminal view of the sum code, as in a key check.
std::vector<std::vector<Variable>> check_groups(const NetworkInstance& g) {
  std::vector<std::vector<Variable>> groups{{Variable::key()}};
  for (const auto& set : g.eavesdrop_sets) {
    auto view = eavesdrop_view(set);
    view.insert(view.begin(), Variable::key());
    groups.push_back(std::move(view));
  }
  for (const auto& d : g.terminals) groups.push_back({Variable::terminal_view(d), Variable::key()});
  return groups;
}

template <bool Parallel>
void joint_counts_gap(benchmark::State& state) {
  const auto g = gap_instance(static_cast<int>(state.range(0)));
  const auto code = sum_code(g);
  const auto groups = check_groups(g);
  for (auto _ : state) {
    auto tables = Parallel ? joint_counts_many(g, code, groups) : joint_counts_many_serial(g, code, groups);
    benchmark::DoNotOptimize(tables);
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << (state.range(0) + 1)));
}

template <bool Parallel>
void search_gap(benchmark::State& state) {
  const auto g = gap_instance(2);
  CodeShape shape;
  shape.family = state.range(0) == 0 ? EncoderFamily::kLinear : EncoderFamily::kAllTables;
  for (auto _ : state) {
    auto r = Parallel ? max_feasible_rate(g, FeasibilityMode::kKey, shape)
                      : max_feasible_rate_serial(g, FeasibilityMode::kKey, shape);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK(joint_counts_gap<true>)->Name("joint_counts/parallel")->DenseRange(8, 14, 3);
BENCHMARK(joint_counts_gap<false>)->Name("joint_counts/serial")->DenseRange(8, 14, 3);
// Argument 0: linear encoders, 1: all truth tables.
BENCHMARK(search_gap<true>)->Name("search_key_gap2/parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(search_gap<false>)->Name("search_key_gap2/serial")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
