#include "powertalk/phy.hpp"

#include <cmath>
#include <numbers>

#include "powertalk/errors.hpp"

namespace powertalk {

namespace {

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace

int samples_per_slot(const PowerTalkParams& params) {
  const int k = static_cast<int>(std::lround(params.slot_duration * params.sampling_frequency));
  if (k < 1) {
    throw InvalidParameterError(
        "samples_per_slot: slot_duration_seconds * sampling_frequency_hz must round to >= 1");
  }
  return k;
}

std::vector<std::string> validate_params(const PowerTalkParams& params,
                                         const GridSpec& grid,
                                         const std::string& context) {
  auto at = [&](const std::string& path) { return context + "." + path; };
  if (!(params.gamma > 0.0)) {
    throw InvalidParameterError(at("gamma_volts") + ": must be > 0");
  }
  if (!(params.slot_duration > 0.0)) {
    throw InvalidParameterError(at("slot_duration_seconds") + ": must be > 0");
  }
  if (!(params.sampling_frequency > 0.0)) {
    throw InvalidParameterError(at("sampling_frequency_hz") + ": must be > 0");
  }
  if (params.noise_sigma < 0.0) {
    throw InvalidParameterError(at("noise_sigma_volts") + ": must be >= 0");
  }
  if (params.bits_per_payload < 1 || params.bits_per_payload > 30) {
    throw InvalidParameterError(at("bits_per_payload") + ": must be in [1, 30]");
  }
  if (params.modulation == Modulation::VirtualResistance) {
    throw UnimplementedError(at("modulation") +
                             ": virtual_resistance signaling is not implemented");
  }
  samples_per_slot(params);  // throws if the discretization collapses

  // Every VSC is a potential transmitter; its deviated reference must stay
  // inside the constraint box.
  for (std::size_t c = 0; c < grid.converters.size(); ++c) {
    const Converter& conv = grid.converters[c];
    if (conv.mode != ConverterMode::VSC) continue;
    if (conv.reference_voltage - params.gamma < conv.constraints.x_min ||
        conv.reference_voltage + params.gamma > conv.constraints.x_max) {
      throw ConstraintError(at("gamma_volts") + ": converter " + std::to_string(c) +
                            " cannot deviate its reference by +/-gamma within [x_min, x_max]");
    }
  }

  std::vector<std::string> warnings;
  // Measurement noise of production converters typically sits between 0.01%
  // and 0.1% of the voltage rating per sample.
  const double lo = 1e-4 * grid.rated_voltage;
  const double hi = 1e-3 * grid.rated_voltage;
  if (params.noise_sigma < lo || params.noise_sigma > hi) {
    warnings.push_back(at("noise_sigma_volts") + ": " + std::to_string(params.noise_sigma) +
                       " V is outside the typical range [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "] V (0.01-0.1% of rating)");
  }
  // The quasi-static model assumes the grid settles within each slot; beyond
  // 1 kBd that assumption gets shaky.
  if (1.0 / params.slot_duration > 1000.0) {
    warnings.push_back(at("slot_duration_seconds") +
                       ": symbol rate above 1 kBd strains the quasi-static assumption");
  }
  return warnings;
}

GridSpec apply_symbol(const GridSpec& grid, int transmitter, int bit,
                      const PowerTalkParams& params) {
  if (transmitter < 0 || transmitter >= static_cast<int>(grid.converters.size())) {
    throw InvalidArgumentError("apply_symbol: transmitter index out of range");
  }
  if (bit != 0 && bit != 1) {
    throw InvalidArgumentError("apply_symbol: bit must be 0 or 1");
  }
  if (params.modulation == Modulation::VirtualResistance) {
    throw UnimplementedError("apply_symbol: virtual_resistance signaling is not implemented");
  }
  const Converter& tx = grid.converters[transmitter];
  if (tx.mode != ConverterMode::VSC) {
    throw InvalidModeError("apply_symbol: converter " + std::to_string(transmitter) +
                           " is not in VSC mode");
  }
  const double x = tx.reference_voltage + (bit == 1 ? params.gamma : -params.gamma);
  if (x < tx.constraints.x_min || x > tx.constraints.x_max) {
    throw ConstraintError("apply_symbol: deviated reference " + std::to_string(x) +
                          " V leaves [x_min, x_max] of converter " + std::to_string(transmitter));
  }
  GridSpec deviated = grid;
  deviated.converters[transmitter].reference_voltage = x;
  return deviated;
}

SlotObservation observe_slot(double true_voltage, const PowerTalkParams& params,
                             Rng& rng, int receiver_bus, long slot_index) {
  const int k = samples_per_slot(params);
  const double sigma_avg = params.noise_sigma / std::sqrt(static_cast<double>(k));
  SlotObservation obs;
  obs.averaged_voltage = rng.normal(true_voltage, sigma_avg);
  obs.receiver_bus = receiver_bus;
  obs.slot_index = slot_index;
  return obs;
}

int detect_bit(const SlotObservation& observation, double baseline_voltage) {
  return observation.averaged_voltage > baseline_voltage ? 1 : 0;
}

double measure_baseline(const GridSpec& grid, int receiver_bus,
                        const PowerTalkParams& params, Rng& rng) {
  if (receiver_bus < 0 || receiver_bus >= static_cast<int>(grid.buses.size())) {
    throw InvalidArgumentError("measure_baseline: receiver bus index out of range");
  }
  const SteadyState state = solve_steady_state(grid);
  return observe_slot(state.v[receiver_bus], params, rng, receiver_bus, -1).averaged_voltage;
}

double analytic_ber(double voltage_swing, const PowerTalkParams& params) {
  if (!(voltage_swing > 0.0)) {
    throw InvalidParameterError("analytic_ber: voltage swing must be positive");
  }
  const int k = samples_per_slot(params);
  const double sigma_avg = params.noise_sigma / std::sqrt(static_cast<double>(k));
  if (sigma_avg == 0.0) return 0.0;  // noiseless detection never errs
  return normal_cdf(-voltage_swing / sigma_avg);
}

}  // namespace powertalk
