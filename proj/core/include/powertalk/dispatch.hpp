#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "powertalk/grid.hpp"
#include "powertalk/mac.hpp"
#include "powertalk/phy.hpp"
#include "powertalk/rng.hpp"

namespace powertalk {

// --- Capacity quantization -------------------------------------------------
//
// A unit reports its spare capacity as a `bits`-wide code.  The code is the
// floor of power / (full_scale / 2^bits), clamped to the largest code, so a
// dequantized report never exceeds the true value: under-reporting wastes a
// little capacity, over-reporting could promise power that is not there.

struct QuantizedPower {
  std::uint32_t code = 0;
  bool clamped = false;  // input fell outside [0, full_scale]
};

QuantizedPower quantize_power(double power_watts, double full_scale_watts, int bits);
double dequantize_power(std::uint32_t code, double full_scale_watts, int bits);

// Big-endian bit layout of a code as a session payload, and back.
BitString code_to_bits(std::uint32_t code, int bits);
std::uint32_t bits_to_code(const BitString& bits);

// --- Economic dispatch -----------------------------------------------------

struct DispatchUnit {
  double capacity_watts = 0.0;
  double incremental_cost = 0.0;  // currency per watt-hour
};

struct DispatchResult {
  std::vector<double> setpoints_watts;  // one per unit, original order
  double served_watts = 0.0;
  double unserved_watts = 0.0;
  double generation_cost_rate = 0.0;  // sum of cost * setpoint, currency/hour
};

// Fills units cheapest-first (ties broken by lower index) until demand or
// capacity runs out.  Unserved demand is reported, not priced here.
DispatchResult merit_order(double demand_watts, const std::vector<DispatchUnit>& units);

// Every unit applies the merit-order rule on its own: true knowledge of its
// own capacity, `reported_capacities` (one per unit, e.g. dequantized codes
// from a power-talk exchange) for everyone else.  Inconsistent reports can
// leave demand unserved or cover it twice; served power is capped at demand
// but all generation is paid for.
DispatchResult distributed_dispatch(double demand_watts,
                                    const std::vector<DispatchUnit>& units,
                                    const std::vector<double>& reported_capacities);

// Generation cost plus penalty-priced unserved energy, currency per hour.
double dispatch_cost_rate(const DispatchResult& result, double penalty_cost_per_wh);

// --- Quantization / signaling trade-off sweep ------------------------------
//
// Monte Carlo estimate of the dispatch suboptimality delta = E[(C_pt -
// C_ideal) / C_ideal] over random capacity draws, for each (bits, gamma)
// cell.  Per run, every unit's capacity is drawn uniformly on [0, p_cap].
// C_ideal is the merit-order cost of one dispatch period with perfect
// information; C_pt prices the same period dispatched from power-talk views
// (quantized to `bits`, signaled with amplitude gamma, detected against
// channel noise) plus — when `price_overhead` is set — the session's
// deviation energy billed at each transmitting unit's own incremental cost.
// Unserved demand is priced at `penalty_cost_per_wh` on both sides.
//
// Capacity draws are keyed by run index only, so every cell prices the same
// capacity realizations (common random numbers); channel noise is keyed by
// (bits, gamma, run) so cells stay independent where they must be.

struct SweepConfig {
  GridSpec grid;                    // converters double as dispatch units
  PowerTalkParams params;           // gamma/bits are overridden per cell
  std::vector<int> bits_values;     // quantizer widths to sweep
  std::vector<double> gamma_values; // signaling amplitudes to sweep, volts
  int num_runs = 100;               // Monte Carlo draws per cell
  double demand_watts = 0.0;
  double p_cap_watts = 0.0;         // capacity draw ceiling = quantizer full scale
  double penalty_cost_per_wh = 0.0; // price of unserved demand
  double period_seconds = 0.0;      // time until the next dispatch round
  bool price_overhead = true;
  std::uint64_t seed = 0;
};

struct SweepCell {
  int bits = 0;
  double gamma_volts = 0.0;
  double delta_mean = 0.0;
  double delta_stderr = 0.0;
  double ber_estimate = 0.0;     // analytic, averaged over ordered tx/rx pairs
  double overhead_wh_mean = 0.0; // signaling energy per session
  int skipped_runs = 0;          // runs excluded for a degenerate ideal cost
};

// Cells are emitted in row-major (bits, gamma) order.  Soft findings (runs
// excluded from a cell's mean) are appended to *warnings when given.
std::vector<SweepCell> run_dispatch_sweep(const SweepConfig& config,
                                          std::vector<std::string>* warnings = nullptr);

}  // namespace powertalk
