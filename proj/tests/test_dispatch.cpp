#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "powertalk/dispatch.hpp"
#include "powertalk/errors.hpp"
#include "powertalk/grid.hpp"
#include "powertalk/rng.hpp"

using namespace powertalk;

namespace {

// Brute-force dispatch oracle: try every unit ordering and fill greedily;
// the cheapest result over all orderings is the optimum for this cost model.
DispatchResult permutation_optimum(double demand, const std::vector<DispatchUnit>& units) {
  std::vector<std::size_t> order(units.size());
  std::iota(order.begin(), order.end(), 0u);
  DispatchResult best;
  double best_cost = -1.0;
  do {
    DispatchResult r;
    r.setpoints_watts.assign(units.size(), 0.0);
    double remaining = demand;
    for (std::size_t u : order) {
      const double take = std::min(remaining, units[u].capacity_watts);
      r.setpoints_watts[u] = take;
      remaining -= take;
      r.generation_cost_rate += take * units[u].incremental_cost;
    }
    r.served_watts = demand - remaining;
    r.unserved_watts = remaining;
    if (best_cost < 0.0 || r.generation_cost_rate < best_cost) {
      best_cost = r.generation_cost_rate;
      best = r;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

Converter vsc(int bus, double x, double r_d, double p_max, double cost) {
  Converter c;
  c.bus = bus;
  c.reference_voltage = x;
  c.virtual_resistance = r_d;
  c.p_max = p_max;
  c.incremental_cost = cost;
  c.constraints = {44.0, 52.0, 0.01, 1.0};
  return c;
}

GridSpec sweep_grid(int num_units) {
  GridSpec g;
  g.rated_voltage = 48.0;
  g.buses = {BusLoad{}};
  for (int u = 0; u < num_units; ++u)
    g.converters.push_back(vsc(0, 48.0, 0.25, 2.3, 1.0 + 0.01 * u));
  return g;
}

SweepConfig base_sweep() {
  SweepConfig cfg;
  cfg.grid = sweep_grid(4);
  cfg.params.slot_duration = 0.005;
  cfg.params.sampling_frequency = 50000.0;
  cfg.params.noise_sigma = 0.05;
  cfg.params.crc_enabled = false;
  cfg.bits_values = {2, 4};
  cfg.gamma_values = {0.1, 1.0};
  cfg.num_runs = 40;
  cfg.demand_watts = 2.5;
  cfg.p_cap_watts = 2.3;
  cfg.penalty_cost_per_wh = 10.0;
  cfg.period_seconds = 300.0;
  cfg.price_overhead = true;
  cfg.seed = 31;
  return cfg;
}

}  // namespace

TEST_SUITE("dispatch") {

TEST_CASE("quantized reports never promise more than is there") {
  Rng rng = derive_substream(21, "quantize");
  for (int trial = 0; trial < 500; ++trial) {
    const double full = rng.uniform(1.0, 2000.0);
    const int bits = 1 + static_cast<int>(rng.below(16));
    const double p = rng.uniform(0.0, full);
    const QuantizedPower q = quantize_power(p, full, bits);
    CHECK_FALSE(q.clamped);
    CHECK(q.code < (1u << bits));
    const double back = dequantize_power(q.code, full, bits);
    CHECK(back <= p + 1e-12 * full);
    CHECK(p - back <= full / std::pow(2.0, bits) + 1e-12 * full);
  }
}

TEST_CASE("quantizer edges clamp and flag") {
  const double full = 100.0;
  CHECK(quantize_power(0.0, full, 3).code == 0);
  // Exactly full scale maps past the last code and is pulled back, but it is
  // still inside the range, so it does not count as clamped.
  const QuantizedPower top = quantize_power(100.0, full, 3);
  CHECK(top.code == 7);
  CHECK_FALSE(top.clamped);
  const QuantizedPower over = quantize_power(150.0, full, 3);
  CHECK(over.code == 7);
  CHECK(over.clamped);
  const QuantizedPower under = quantize_power(-1.0, full, 3);
  CHECK(under.code == 0);
  CHECK(under.clamped);
  // Just below a step boundary stays on the lower code.
  CHECK(quantize_power(12.5 - 1e-9, full, 3).code == 0);
  CHECK(quantize_power(12.5, full, 3).code == 1);
}

TEST_CASE("code bit layout is big-endian and round-trips") {
  const BitString b = code_to_bits(5, 4);
  REQUIRE(b.size() == 4);
  CHECK(b[0] == 0);
  CHECK(b[1] == 1);
  CHECK(b[2] == 0);
  CHECK(b[3] == 1);
  CHECK(bits_to_code(b) == 5);
  for (int bits = 1; bits <= 10; ++bits)
    for (std::uint32_t code = 0; code < (1u << bits); ++code)
      CHECK(bits_to_code(code_to_bits(code, bits)) == code);
}

TEST_CASE("merit order matches the permutation oracle") {
  Rng rng = derive_substream(22, "merit");
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(5));
    std::vector<DispatchUnit> units(static_cast<std::size_t>(n));
    double total = 0.0;
    for (auto& u : units) {
      u.capacity_watts = rng.uniform(0.0, 20.0);
      u.incremental_cost = rng.uniform(0.5, 3.0);
      total += u.capacity_watts;
    }
    const double demand = rng.uniform(0.0, total + 5.0);
    const DispatchResult got = merit_order(demand, units);
    const DispatchResult want = permutation_optimum(demand, units);
    CHECK(got.generation_cost_rate == doctest::Approx(want.generation_cost_rate).epsilon(1e-9));
    CHECK(got.served_watts == doctest::Approx(std::min(demand, total)).epsilon(1e-9));
    CHECK(got.unserved_watts == doctest::Approx(demand - got.served_watts).epsilon(1e-9));
    double setpoint_sum = 0.0;
    for (double s : got.setpoints_watts) setpoint_sum += s;
    CHECK(setpoint_sum == doctest::Approx(got.served_watts).epsilon(1e-9));
  }
}

TEST_CASE("merit order breaks cost ties by unit index") {
  const std::vector<DispatchUnit> units = {{10.0, 1.0}, {10.0, 1.0}, {10.0, 0.9}};
  const DispatchResult r = merit_order(15.0, units);
  CHECK(r.setpoints_watts[2] == doctest::Approx(10.0));
  CHECK(r.setpoints_watts[0] == doctest::Approx(5.0));
  CHECK(r.setpoints_watts[1] == doctest::Approx(0.0));
}

TEST_CASE("distributed dispatch with honest reports equals merit order") {
  Rng rng = derive_substream(23, "honest");
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(4));
    std::vector<DispatchUnit> units(static_cast<std::size_t>(n));
    std::vector<double> reports;
    for (auto& u : units) {
      u.capacity_watts = rng.uniform(0.0, 20.0);
      u.incremental_cost = rng.uniform(0.5, 3.0) + 0.001 * static_cast<double>(reports.size());
      reports.push_back(u.capacity_watts);
    }
    const double demand = rng.uniform(0.0, 50.0);
    const DispatchResult a = distributed_dispatch(demand, units, reports);
    const DispatchResult b = merit_order(demand, units);
    for (std::size_t u = 0; u < units.size(); ++u)
      CHECK(a.setpoints_watts[u] == doctest::Approx(b.setpoints_watts[u]).epsilon(1e-9));
  }
}

TEST_CASE("under-reporting leaves demand stranded at the wrong unit") {
  // Unit 0 is cheaper; everyone believes it can only give 8 W.
  const std::vector<DispatchUnit> units = {{10.0, 1.0}, {10.0, 2.0}};
  const DispatchResult r = distributed_dispatch(10.0, units, {8.0, 10.0});
  // Unit 0 serves min(own true 10, residual demand 10) under its own
  // merit slot, but unit 1 only sees 10 - 8 = 2 W left over.
  CHECK(r.setpoints_watts[0] == doctest::Approx(10.0));
  CHECK(r.setpoints_watts[1] == doctest::Approx(2.0));
  // Both generate, the surplus is still paid for, service caps at demand.
  CHECK(r.served_watts == doctest::Approx(10.0));
  CHECK(r.unserved_watts == doctest::Approx(0.0));
  CHECK(r.generation_cost_rate == doctest::Approx(10.0 * 1.0 + 2.0 * 2.0));
}

TEST_CASE("a unit cannot deliver more than it truly has") {
  // Reports say 12 W but the true capacity is 6 W: the shortfall is unserved.
  const std::vector<DispatchUnit> units = {{6.0, 1.0}, {10.0, 2.0}};
  const DispatchResult r = distributed_dispatch(10.0, units, {12.0, 10.0});
  CHECK(r.setpoints_watts[0] == doctest::Approx(6.0));
  // Unit 1 believes unit 0 covered 10 of 10, so it stays off.
  CHECK(r.setpoints_watts[1] == doctest::Approx(0.0));
  CHECK(r.served_watts == doctest::Approx(6.0));
  CHECK(r.unserved_watts == doctest::Approx(4.0));
}

TEST_CASE("penalty pricing adds unserved energy at the penalty rate") {
  DispatchResult r;
  r.generation_cost_rate = 12.0;
  r.unserved_watts = 3.0;
  CHECK(dispatch_cost_rate(r, 10.0) == doctest::Approx(12.0 + 30.0));
  CHECK(dispatch_cost_rate(r, 0.0) == doctest::Approx(12.0));
}

TEST_CASE("sweep cells come out row-major with bits outermost") {
  const SweepConfig cfg = base_sweep();
  const std::vector<SweepCell> cells = run_dispatch_sweep(cfg);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].bits == 2);
  CHECK(cells[0].gamma_volts == doctest::Approx(0.1));
  CHECK(cells[1].bits == 2);
  CHECK(cells[1].gamma_volts == doctest::Approx(1.0));
  CHECK(cells[2].bits == 4);
  CHECK(cells[3].bits == 4);
  for (const SweepCell& c : cells) {
    CHECK(c.delta_mean >= 0.0);
    CHECK(c.delta_stderr >= 0.0);
    CHECK(c.overhead_wh_mean > 0.0);
    CHECK(c.skipped_runs >= 0);
    CHECK(c.skipped_runs <= cfg.num_runs);
  }
}

TEST_CASE("sweep overhead grows with code width and errors fall with amplitude") {
  SweepConfig cfg = base_sweep();
  cfg.bits_values = {2, 6};
  cfg.gamma_values = {0.05, 0.5};
  const std::vector<SweepCell> cells = run_dispatch_sweep(cfg);
  REQUIRE(cells.size() == 4);
  // More bits means more slots, hence more deviation energy at equal gamma.
  CHECK(cells[2].overhead_wh_mean > cells[0].overhead_wh_mean);
  CHECK(cells[3].overhead_wh_mean > cells[1].overhead_wh_mean);
  // A stronger signal is easier to detect.
  CHECK(cells[1].ber_estimate < cells[0].ber_estimate);
  CHECK(cells[0].ber_estimate > 0.0);
  CHECK(cells[0].ber_estimate < 0.5);
}

TEST_CASE("with a clean channel and fine codes the penalty vanishes") {
  SweepConfig cfg = base_sweep();
  cfg.params.noise_sigma = 0.0;
  cfg.bits_values = {20};
  cfg.gamma_values = {1e-6};
  cfg.price_overhead = false;
  cfg.num_runs = 60;
  const std::vector<SweepCell> cells = run_dispatch_sweep(cfg);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].delta_mean >= 0.0);
  CHECK(cells[0].delta_mean < 1e-4);
  CHECK(cells[0].ber_estimate == doctest::Approx(0.0));
}

TEST_CASE("capacity draws are shared across cells") {
  // With no noise, no overhead pricing, and equal quantizers, two gammas must
  // produce identical deltas: the only randomness is the capacity draw, and
  // that is keyed by run index alone.
  SweepConfig cfg = base_sweep();
  cfg.params.noise_sigma = 0.0;
  cfg.bits_values = {4};
  cfg.gamma_values = {0.05, 0.8};
  cfg.price_overhead = false;
  const std::vector<SweepCell> cells = run_dispatch_sweep(cfg);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].delta_mean == doctest::Approx(cells[1].delta_mean).epsilon(1e-12));
  CHECK(cells[0].delta_stderr == doctest::Approx(cells[1].delta_stderr).epsilon(1e-12));
}

TEST_CASE("sweeps are reproducible and seed-sensitive") {
  const SweepConfig cfg = base_sweep();
  const std::vector<SweepCell> a = run_dispatch_sweep(cfg);
  const std::vector<SweepCell> b = run_dispatch_sweep(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].delta_mean == b[i].delta_mean);
    CHECK(a[i].overhead_wh_mean == b[i].overhead_wh_mean);
  }
  SweepConfig other = cfg;
  other.seed = 32;
  const std::vector<SweepCell> c = run_dispatch_sweep(other);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (c[i].delta_mean != a[i].delta_mean) any_differs = true;
  CHECK(any_differs);
}

}  // TEST_SUITE
