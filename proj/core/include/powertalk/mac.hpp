#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "powertalk/grid.hpp"
#include "powertalk/phy.hpp"
#include "powertalk/rng.hpp"

namespace powertalk {

// TDMA access on top of the signaling layer.  A session is split into one
// sub-phase per unit; unit k owns the contiguous slot block
// [k*L, (k+1)*L) where L is the frame length (payload bits, plus 8 CRC bits
// when CRC is enabled).  All other units listen and detect.

// Bits are stored one per element, value 0 or 1, most significant first.
using BitString = std::vector<std::uint8_t>;

struct SlotAssignment {
  int transmitter = 0;   // unit index
  int bit_position = 0;  // position within the unit's frame
};

struct TdmaSchedule {
  int num_units = 0;
  int payload_bits = 0;  // per unit
  bool crc_enabled = false;
  std::vector<SlotAssignment> slot_assignments;

  int frame_bits() const { return payload_bits + (crc_enabled ? 8 : 0); }
  int total_slots() const { return static_cast<int>(slot_assignments.size()); }
};

TdmaSchedule build_schedule(int num_units, int payload_bits, bool crc_enabled);

// CRC-8, polynomial 0x07 (x^8 + x^2 + x + 1), init 0x00, MSB first, no
// reflection, no final XOR.
std::uint8_t crc8(const std::uint8_t* data, std::size_t len);

// CRC over a bit string: the payload is left-padded with zeros to a whole
// number of 8-bit groups, packed MSB-first, and fed through crc8.  Returns
// the 8 checksum bits, MSB first.
BitString crc8_bits(const BitString& payload);

struct Frame {
  BitString payload_bits;
  BitString crc_bits;  // empty when CRC is disabled

  BitString wire_bits() const;  // payload followed by checksum
};

Frame encode_frame(const BitString& payload, bool crc_enabled);

// Splits received wire bits back into payload (+ checksum), verifies the
// checksum when enabled.  Returns nullopt on checksum mismatch.
std::optional<BitString> decode_frame(const BitString& wire_bits, int payload_bits,
                                      bool crc_enabled);

// A timed change of one bus's load, seconds from session start.  The change
// takes effect at the granularity of whole slots: the slot containing the
// event time already sees the new load.
struct LoadChangeEvent {
  double time = 0.0;
  int bus = 0;
  BusLoad new_load;
};

// What one unit decoded from one transmitter's sub-phase.
struct UnitView {
  BitString payload;
  bool crc_ok = true;
};

struct SessionReport {
  // views[receiver][transmitter]; a unit's view of itself is its own payload.
  std::vector<std::vector<UnitView>> views;
  // Total energy spent on deviations from the pre-session operating point,
  // summed over all converters and slots, watt-hours.
  double energy_overhead_wh = 0.0;
  // Same energy, attributed to the unit transmitting in each slot.
  std::vector<double> overhead_wh_by_transmitter;
  int retries = 0;
  bool aborted = false;
  long slots_elapsed = 0;  // including baseline slots and retried attempts
};

// Everything one data slot produced: the slot-true grid state plus what each
// listening unit observed and decided.  Entries for the transmitting unit
// hold NaN / -1 (half-duplex: it does not listen to itself).
struct SlotRecord {
  long slot = 0;  // absolute index within the session, baseline slots included
  int transmitter = 0;
  int bit = 0;
  const GridSpec* grid = nullptr;
  const SteadyState* state = nullptr;
  std::vector<double> observations;  // per unit, volts
  std::vector<int> decisions;        // per unit, 0/1, -1 for the transmitter
};

struct SessionOptions {
  int max_retries = 3;
  // Called once per data slot; used by the timeline recorder and the
  // per-slot CSV trace.
  std::function<void(const SlotRecord&)> slot_observer;
};

// Runs one TDMA session on `grid`.
//
//   units     converter indices that take part; CSCs among them are switched
//             to VSC mode (at their configured reference) for the whole
//             session, reverting afterwards
//   payloads  one bit string of identical length per unit
//   events    timed load changes; a change mid-session corrupts detection
//             against the stale baseline, which CRC-enabled sessions catch
//             and answer with a full restart (fresh baseline), up to
//             options.max_retries times
//
// Receivers measure their own bus.  Baselines are taken once per attempt in
// a silent slot before slot 0, per receiver.  Transmitters skip detection
// during their own sub-phase (half-duplex) and report their own payload.
SessionReport run_session(const GridSpec& grid, const PowerTalkParams& params,
                          const std::vector<int>& units,
                          const std::vector<BitString>& payloads,
                          const std::vector<LoadChangeEvent>& events,
                          const RngKey& rng_key, const SessionOptions& options = {});

// Convenience overload: every converter of the grid is a unit.
SessionReport run_session(const GridSpec& grid, const PowerTalkParams& params,
                          const std::vector<BitString>& payloads,
                          const std::vector<LoadChangeEvent>& events,
                          const RngKey& rng_key, const SessionOptions& options = {});

}  // namespace powertalk
