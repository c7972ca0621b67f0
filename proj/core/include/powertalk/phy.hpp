#pragma once

#include <string>
#include <vector>

#include "powertalk/grid.hpp"
#include "powertalk/rng.hpp"

namespace powertalk {

// Physical layer of droop-parameter signaling.
//
// A transmitting VSC signals one bit per slot by deviating its reference
// voltage: bit 1 -> x + gamma, bit 0 -> x - gamma.  Receivers average the
// bus-voltage samples taken during the slot and compare the average against
// a baseline recorded while everyone was silent.

enum class Modulation {
  ReferenceVoltage,    // deviate x (implemented)
  VirtualResistance,   // deviate r_d (declared, unimplemented)
};

struct PowerTalkParams {
  double gamma = 0.0;               // signal amplitude, volts
  double slot_duration = 0.0;       // T_S, seconds
  double sampling_frequency = 0.0;  // f_s, hertz
  double noise_sigma = 0.0;         // per-sample measurement noise, volts
  int bits_per_payload = 0;         // payload bits per unit and session
  bool crc_enabled = false;
  Modulation modulation = Modulation::ReferenceVoltage;
};

// round(T_S * f_s); the discretization must leave at least one sample.
int samples_per_slot(const PowerTalkParams& params);

// Hard errors throw; soft findings (noise outside the usual band, unusually
// fast slot rate) are returned as warning strings.  `context` prefixes
// messages, e.g. "powertalk".
std::vector<std::string> validate_params(const PowerTalkParams& params,
                                         const GridSpec& grid,
                                         const std::string& context = "powertalk");

// Copy of the grid with the transmitter's reference deviated for one slot.
// gamma == 0 returns the grid unchanged.  The transmitter must be a VSC and
// the deviated reference must stay inside the converter's constraint box.
GridSpec apply_symbol(const GridSpec& grid, int transmitter, int bit,
                      const PowerTalkParams& params);

struct SlotObservation {
  double averaged_voltage = 0.0;  // mean of the slot's samples, volts
  int receiver_bus = 0;
  long slot_index = 0;
};

// Slot average seen by a receiver whose bus sits at `true_voltage`.  The
// average of K iid Gaussian samples is itself Gaussian with deviation
// sigma / sqrt(K), so it is drawn directly; this is distribution-identical
// to averaging K draws and keeps long sweeps fast.
SlotObservation observe_slot(double true_voltage, const PowerTalkParams& params,
                             Rng& rng, int receiver_bus = 0, long slot_index = 0);

// Threshold detector: 1 if the observation exceeds the baseline, else 0
// (ties decode as 0).
int detect_bit(const SlotObservation& observation, double baseline_voltage);

// One silent-slot observation of the undisturbed grid at the receiver's bus.
double measure_baseline(const GridSpec& grid, int receiver_bus,
                        const PowerTalkParams& params, Rng& rng);

// Probability that a slot average falls on the wrong side of the baseline
// given a voltage swing of `voltage_swing` volts: Phi(-swing / (sigma/sqrt(K))).
// The swing must be positive.
double analytic_ber(double voltage_swing, const PowerTalkParams& params);

}  // namespace powertalk
