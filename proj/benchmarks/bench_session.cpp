#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "powertalk/mac.hpp"
#include "powertalk/phy.hpp"
#include "powertalk/rng.hpp"

using namespace powertalk;

namespace {

GridSpec shared_bus(int units) {
  GridSpec g;
  g.rated_voltage = 48.0;
  g.buses = {BusLoad{0.0, 0.0, 300.0}};
  for (int u = 0; u < units; ++u) {
    Converter c;
    c.bus = 0;
    c.reference_voltage = 48.0;
    c.virtual_resistance = 0.25;
    c.p_max = 500.0;
    c.incremental_cost = 1.0;
    c.constraints = {44.0, 52.0, 0.01, 1.0};
    g.converters.push_back(c);
  }
  return g;
}

// Full TDMA round: every unit broadcasts one payload, every unit decodes
// every frame.  Reported rate is data slots per second.
void BM_RunSession(benchmark::State& state) {
  const int units = static_cast<int>(state.range(0));
  const int bits = static_cast<int>(state.range(1));

  const GridSpec g = shared_bus(units);
  PowerTalkParams p;
  p.gamma = 0.2;
  p.slot_duration = 0.005;
  p.sampling_frequency = 50000.0;
  p.noise_sigma = 0.01;
  p.bits_per_payload = bits;
  p.crc_enabled = true;

  Rng rng = derive_substream(7, "bench/payloads");
  std::vector<BitString> payloads;
  for (int u = 0; u < units; ++u) {
    BitString b(static_cast<std::size_t>(bits));
    for (auto& v : b) v = static_cast<std::uint8_t>(rng.below(2));
    payloads.push_back(b);
  }

  std::uint64_t round = 0;
  std::int64_t slots = 0;
  for (auto _ : state) {
    const SessionReport r =
        run_session(g, p, payloads, {}, RngKey{round++, "bench"});
    benchmark::DoNotOptimize(r.slots_elapsed);
    slots += r.slots_elapsed;
  }
  state.SetItemsProcessed(slots);
}

}  // namespace

BENCHMARK(BM_RunSession)->Args({2, 8})->Args({6, 8})->Args({10, 8})->Args({10, 16});

BENCHMARK_MAIN();
