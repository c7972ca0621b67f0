#include "powertalk/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "powertalk/errors.hpp"
#include "powertalk/format.hpp"
#include "powertalk/mac.hpp"

namespace powertalk {

namespace {

void check_quantizer(double full_scale_watts, int bits, const char* who) {
  if (!(full_scale_watts > 0.0)) {
    throw InvalidParameterError(std::string(who) + ": full scale must be positive");
  }
  if (bits < 1 || bits > 30) {
    throw InvalidParameterError(std::string(who) + ": bits must be in [1, 30]");
  }
}

}  // namespace

QuantizedPower quantize_power(double power_watts, double full_scale_watts, int bits) {
  check_quantizer(full_scale_watts, bits, "quantize_power");
  if (!std::isfinite(power_watts)) {
    throw InvalidParameterError("quantize_power: power must be finite");
  }
  QuantizedPower out;
  double p = power_watts;
  if (p < 0.0) {
    p = 0.0;
    out.clamped = true;
  } else if (p > full_scale_watts) {
    p = full_scale_watts;
    out.clamped = true;
  }
  const std::uint32_t levels = 1u << bits;
  const double scaled = std::floor(p * static_cast<double>(levels) / full_scale_watts);
  const double max_code = static_cast<double>(levels - 1);
  out.code = static_cast<std::uint32_t>(std::min(scaled, max_code));
  return out;
}

double dequantize_power(std::uint32_t code, double full_scale_watts, int bits) {
  check_quantizer(full_scale_watts, bits, "dequantize_power");
  const std::uint32_t levels = 1u << bits;
  if (code >= levels) {
    throw InvalidArgumentError("dequantize_power: code " + std::to_string(code) +
                               " does not fit in " + std::to_string(bits) + " bits");
  }
  return static_cast<double>(code) * full_scale_watts / static_cast<double>(levels);
}

namespace {

void check_units(double demand_watts, const std::vector<DispatchUnit>& units,
                 const char* who) {
  if (!(demand_watts >= 0.0)) {
    throw InvalidParameterError(std::string(who) + ": demand must be non-negative");
  }
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (!(units[u].capacity_watts >= 0.0)) {
      throw InvalidParameterError(std::string(who) + ": units[" + std::to_string(u) +
                                  "].capacity_watts must be non-negative");
    }
    if (!(units[u].incremental_cost >= 0.0)) {
      throw InvalidParameterError(std::string(who) + ": units[" + std::to_string(u) +
                                  "].incremental_cost must be non-negative");
    }
  }
}

// Unit indices sorted cheapest-first, ties broken by lower index.
std::vector<std::size_t> merit_ranking(const std::vector<DispatchUnit>& units) {
  std::vector<std::size_t> order(units.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return units[a].incremental_cost < units[b].incremental_cost;
  });
  return order;
}

DispatchResult summarize(double demand_watts, const std::vector<DispatchUnit>& units,
                         std::vector<double> setpoints) {
  DispatchResult result;
  double total = 0.0;
  for (std::size_t u = 0; u < units.size(); ++u) {
    total += setpoints[u];
    result.generation_cost_rate += units[u].incremental_cost * setpoints[u];
  }
  result.setpoints_watts = std::move(setpoints);
  result.served_watts = std::min(demand_watts, total);
  result.unserved_watts = std::max(0.0, demand_watts - total);
  return result;
}

}  // namespace

DispatchResult merit_order(double demand_watts, const std::vector<DispatchUnit>& units) {
  check_units(demand_watts, units, "merit_order");
  std::vector<double> setpoints(units.size(), 0.0);
  double remaining = demand_watts;
  for (std::size_t u : merit_ranking(units)) {
    const double p = std::min(units[u].capacity_watts, remaining);
    setpoints[u] = p;
    remaining -= p;
  }
  return summarize(demand_watts, units, std::move(setpoints));
}

DispatchResult distributed_dispatch(double demand_watts,
                                    const std::vector<DispatchUnit>& units,
                                    const std::vector<double>& reported_capacities) {
  check_units(demand_watts, units, "distributed_dispatch");
  if (reported_capacities.size() != units.size()) {
    throw InvalidArgumentError(
        "distributed_dispatch: need one reported capacity per unit");
  }
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (!(reported_capacities[u] >= 0.0)) {
      throw InvalidParameterError("distributed_dispatch: reported_capacities[" +
                                  std::to_string(u) + "] must be non-negative");
    }
  }
  std::vector<double> setpoints(units.size(), 0.0);
  double reported_ahead = 0.0;
  for (std::size_t u : merit_ranking(units)) {
    const double residual = std::max(0.0, demand_watts - reported_ahead);
    setpoints[u] = std::min(units[u].capacity_watts, residual);
    reported_ahead += reported_capacities[u];
  }
  return summarize(demand_watts, units, std::move(setpoints));
}

double dispatch_cost_rate(const DispatchResult& result, double penalty_cost_per_wh) {
  if (!(penalty_cost_per_wh >= 0.0)) {
    throw InvalidParameterError("dispatch_cost_rate: penalty must be non-negative");
  }
  return result.generation_cost_rate + result.unserved_watts * penalty_cost_per_wh;
}

namespace {

void check_sweep(const SweepConfig& config) {
  if (config.grid.converters.size() < 2) {
    throw InvalidParameterError("sweep: need at least two dispatch units");
  }
  for (std::size_t c = 0; c < config.grid.converters.size(); ++c) {
    if (!(config.grid.converters[c].incremental_cost > 0.0)) {
      throw InvalidParameterError("sweep: converters[" + std::to_string(c) +
                                  "].incremental_cost must be positive");
    }
  }
  if (config.bits_values.empty()) {
    throw InvalidParameterError("sweep: bits_values must not be empty");
  }
  for (int bits : config.bits_values) check_quantizer(1.0, bits, "sweep");
  if (config.gamma_values.empty()) {
    throw InvalidParameterError("sweep: gamma_values must not be empty");
  }
  for (double gamma : config.gamma_values) {
    if (!(gamma > 0.0)) {
      throw InvalidParameterError("sweep: gamma values must be positive");
    }
  }
  if (config.num_runs < 1) {
    throw InvalidParameterError("sweep: num_runs must be >= 1");
  }
  if (!(config.demand_watts > 0.0)) {
    throw InvalidParameterError("sweep: demand must be positive");
  }
  if (!(config.p_cap_watts > 0.0)) {
    throw InvalidParameterError("sweep: p_cap must be positive");
  }
  if (!(config.penalty_cost_per_wh >= 0.0)) {
    throw InvalidParameterError("sweep: penalty must be non-negative");
  }
  if (!(config.period_seconds > 0.0)) {
    throw InvalidParameterError("sweep: dispatch period must be positive");
  }
}

// Expected bit error rate for the cell, averaged over ordered (tx, rx)
// pairs, using noise-free slot voltages from the quiet operating point.
double cell_ber(const GridSpec& grid, const PowerTalkParams& params) {
  const SteadyState quiet = solve_steady_state(grid);
  const int num_units = static_cast<int>(grid.converters.size());
  double sum = 0.0;
  int pairs = 0;
  for (int tx = 0; tx < num_units; ++tx) {
    const SteadyState mark = solve_steady_state(apply_symbol(grid, tx, 1, params));
    const SteadyState space = solve_steady_state(apply_symbol(grid, tx, 0, params));
    for (int rx = 0; rx < num_units; ++rx) {
      if (rx == tx) continue;
      const int bus = grid.converters[rx].bus;
      const double up = mark.v[bus] - quiet.v[bus];
      const double down = quiet.v[bus] - space.v[bus];
      sum += 0.5 * (analytic_ber(up, params) + analytic_ber(down, params));
      ++pairs;
    }
  }
  return sum / pairs;
}

}  // namespace

BitString code_to_bits(std::uint32_t code, int bits) {
  if (bits < 1 || bits > 30) {
    throw InvalidParameterError("code_to_bits: bits must be in [1, 30]");
  }
  BitString out(bits);
  for (int i = 0; i < bits; ++i) {
    out[i] = static_cast<std::uint8_t>((code >> (bits - 1 - i)) & 1u);
  }
  return out;
}

std::uint32_t bits_to_code(const BitString& bits) {
  if (bits.size() > 30) {
    throw InvalidParameterError("bits_to_code: at most 30 bits");
  }
  std::uint32_t code = 0;
  for (std::uint8_t b : bits) code = (code << 1) | (b & 1u);
  return code;
}

std::vector<SweepCell> run_dispatch_sweep(const SweepConfig& config,
                                          std::vector<std::string>* warnings) {
  check_sweep(config);
  const int num_units = static_cast<int>(config.grid.converters.size());

  GridSpec grid = config.grid;
  for (Converter& conv : grid.converters) conv.mode = ConverterMode::VSC;

  std::vector<DispatchUnit> units(num_units);
  for (int u = 0; u < num_units; ++u) {
    units[u].incremental_cost = grid.converters[u].incremental_cost;
  }

  const RngKey key{config.seed, ""};
  const double period_hours = config.period_seconds / 3600.0;

  // Capacity draws depend on the run index only, so every (bits, gamma) cell
  // prices the same capacity realizations and cell-to-cell differences come
  // from quantization and signaling alone.
  std::vector<std::vector<double>> capacities(config.num_runs,
                                              std::vector<double>(num_units));
  for (int run = 0; run < config.num_runs; ++run) {
    Rng draw = key.stream("capacity/run:" + std::to_string(run));
    for (int u = 0; u < num_units; ++u) {
      capacities[run][u] = draw.uniform(0.0, config.p_cap_watts);
    }
  }

  std::vector<SweepCell> cells;
  cells.reserve(config.bits_values.size() * config.gamma_values.size());

  for (int bits : config.bits_values) {
    for (double gamma : config.gamma_values) {
      PowerTalkParams params = config.params;
      params.gamma = gamma;
      params.bits_per_payload = bits;

      SweepCell cell;
      cell.bits = bits;
      cell.gamma_volts = gamma;
      cell.ber_estimate = cell_ber(grid, params);

      const std::string cell_label = "noise/bits:" + std::to_string(bits) +
                                     "/gamma:" + format_double(gamma);
      double delta_sum = 0.0;
      double delta_sq_sum = 0.0;
      double overhead_sum = 0.0;

      for (int run = 0; run < config.num_runs; ++run) {
        const std::vector<double>& caps = capacities[run];
        for (int u = 0; u < num_units; ++u) {
          units[u].capacity_watts = caps[u];
          grid.converters[u].p_max = caps[u];
        }
        // Costs of one dispatch period, currency: rate * hours (+ overhead).
        const double ideal_cost =
            dispatch_cost_rate(merit_order(config.demand_watts, units),
                               config.penalty_cost_per_wh) *
            period_hours;
        if (!(ideal_cost > 0.0)) {
          ++cell.skipped_runs;
          continue;
        }

        std::vector<BitString> payloads(num_units);
        for (int u = 0; u < num_units; ++u) {
          payloads[u] = code_to_bits(
              quantize_power(caps[u], config.p_cap_watts, bits).code, bits);
        }
        const RngKey session_key =
            key.child(cell_label + "/run:" + std::to_string(run));
        const SessionReport session =
            run_session(grid, params, payloads, {}, session_key);
        overhead_sum += session.energy_overhead_wh;

        // Each unit dispatches itself from its own decoded view of the
        // exchange; only its own row of the rule's output is realized.
        std::vector<double> setpoints(num_units);
        std::vector<double> reported(num_units);
        for (int u = 0; u < num_units; ++u) {
          for (int k = 0; k < num_units; ++k) {
            reported[k] = dequantize_power(bits_to_code(session.views[u][k].payload),
                                           config.p_cap_watts, bits);
          }
          const DispatchResult local =
              distributed_dispatch(config.demand_watts, units, reported);
          setpoints[u] = local.setpoints_watts[u];
        }
        DispatchResult realized = summarize(config.demand_watts, units, setpoints);
        double pt_cost = dispatch_cost_rate(realized, config.penalty_cost_per_wh) *
                         period_hours;
        if (config.price_overhead) {
          for (int u = 0; u < num_units; ++u) {
            pt_cost += session.overhead_wh_by_transmitter[u] *
                       units[u].incremental_cost;
          }
        }
        const double delta = (pt_cost - ideal_cost) / ideal_cost;
        delta_sum += delta;
        delta_sq_sum += delta * delta;
      }

      const int used = config.num_runs - cell.skipped_runs;
      if (used > 0) {
        const double n = static_cast<double>(used);
        cell.delta_mean = delta_sum / n;
        cell.overhead_wh_mean = overhead_sum / n;
        if (used > 1) {
          const double var = std::max(
              0.0, (delta_sq_sum - n * cell.delta_mean * cell.delta_mean) / (n - 1.0));
          cell.delta_stderr = std::sqrt(var / n);
        }
      }
      if (cell.skipped_runs > 0 && warnings) {
        warnings->push_back("sweep: bits=" + std::to_string(bits) +
                            " gamma=" + format_double(gamma) + ": excluded " +
                            std::to_string(cell.skipped_runs) +
                            " run(s) with a degenerate ideal cost");
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace powertalk
