#include <benchmark/benchmark.h>

#include "powertalk/grid.hpp"
#include "powertalk/rng.hpp"

using namespace powertalk;

namespace {

// A ring of `n` buses, one droop source per bus, resistive load on every
// other bus.  Deterministic but irregular enough to keep Newton honest.
GridSpec ring_grid(int n) {
  Rng rng = derive_substream(99, "bench/ring/" + std::to_string(n));
  GridSpec g;
  g.rated_voltage = 48.0;
  g.buses.resize(static_cast<std::size_t>(n));
  for (int b = 0; b < n; ++b) {
    if (b % 2 == 0) g.buses[static_cast<std::size_t>(b)].d_ca = rng.uniform(100.0, 400.0);
    Converter c;
    c.bus = b;
    c.reference_voltage = rng.uniform(47.8, 48.2);
    c.virtual_resistance = rng.uniform(0.1, 0.3);
    c.p_max = 500.0;
    c.incremental_cost = 1.0;
    c.constraints = {44.0, 52.0, 0.01, 1.0};
    g.converters.push_back(c);
    if (n > 1) g.lines.push_back(Line{b, (b + 1) % n, rng.uniform(0.2, 0.6)});
  }
  return g;
}

void BM_SolveSteadyState(benchmark::State& state) {
  const GridSpec g = ring_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_steady_state(g));
  }
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_SolveSteadyState)->Arg(1)->Arg(4)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
