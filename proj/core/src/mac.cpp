#include "powertalk/mac.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "powertalk/errors.hpp"

namespace powertalk {

TdmaSchedule build_schedule(int num_units, int payload_bits, bool crc_enabled) {
  if (num_units < 1) {
    throw InvalidParameterError("build_schedule: num_units must be >= 1");
  }
  if (payload_bits < 1) {
    throw InvalidParameterError("build_schedule: payload_bits must be >= 1");
  }
  TdmaSchedule schedule;
  schedule.num_units = num_units;
  schedule.payload_bits = payload_bits;
  schedule.crc_enabled = crc_enabled;
  const int frame = schedule.frame_bits();
  schedule.slot_assignments.reserve(static_cast<std::size_t>(num_units) * frame);
  for (int unit = 0; unit < num_units; ++unit) {
    for (int bit = 0; bit < frame; ++bit) {
      schedule.slot_assignments.push_back({unit, bit});
    }
  }
  return schedule;
}

std::uint8_t crc8(const std::uint8_t* data, std::size_t len) {
  std::uint8_t crc = 0x00;
  for (std::size_t i = 0; i < len; ++i) {
    crc ^= data[i];
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x80) ? static_cast<std::uint8_t>((crc << 1) ^ 0x07)
                         : static_cast<std::uint8_t>(crc << 1);
    }
  }
  return crc;
}

BitString crc8_bits(const BitString& payload) {
  for (std::uint8_t b : payload) {
    if (b > 1) throw InvalidArgumentError("crc8_bits: bit values must be 0 or 1");
  }
  // Left-pad to a whole number of octets, pack MSB first.
  const std::size_t padded = (payload.size() + 7) / 8 * 8;
  const std::size_t pad = padded - payload.size();
  std::vector<std::uint8_t> bytes(padded / 8, 0);
  for (std::size_t i = 0; i < payload.size(); ++i) {
    const std::size_t pos = pad + i;
    if (payload[i]) bytes[pos / 8] |= static_cast<std::uint8_t>(0x80u >> (pos % 8));
  }
  const std::uint8_t checksum = crc8(bytes.data(), bytes.size());
  BitString bits(8);
  for (int i = 0; i < 8; ++i) bits[i] = (checksum >> (7 - i)) & 1u;
  return bits;
}

BitString Frame::wire_bits() const {
  BitString bits = payload_bits;
  bits.insert(bits.end(), crc_bits.begin(), crc_bits.end());
  return bits;
}

Frame encode_frame(const BitString& payload, bool crc_enabled) {
  if (payload.empty()) throw InvalidArgumentError("encode_frame: payload must not be empty");
  Frame frame;
  frame.payload_bits = payload;
  if (crc_enabled) frame.crc_bits = crc8_bits(payload);
  return frame;
}

std::optional<BitString> decode_frame(const BitString& wire_bits, int payload_bits,
                                      bool crc_enabled) {
  const int expected = payload_bits + (crc_enabled ? 8 : 0);
  if (payload_bits < 1 || static_cast<int>(wire_bits.size()) != expected) {
    throw InvalidArgumentError("decode_frame: got " + std::to_string(wire_bits.size()) +
                               " bits, expected " + std::to_string(expected));
  }
  BitString payload(wire_bits.begin(), wire_bits.begin() + payload_bits);
  if (crc_enabled) {
    const BitString expected_crc = crc8_bits(payload);
    for (int i = 0; i < 8; ++i) {
      if (expected_crc[i] != wire_bits[payload_bits + i]) return std::nullopt;
    }
  }
  return payload;
}

namespace {

struct SessionSetup {
  int num_units = 0;
  int payload_bits = 0;
  std::vector<int> unit_bus;  // bus each unit measures / drives
};

SessionSetup check_session_inputs(const GridSpec& grid, const std::vector<int>& units,
                                  const std::vector<BitString>& payloads,
                                  const std::vector<LoadChangeEvent>& events) {
  if (units.empty()) throw InvalidArgumentError("run_session: unit list must not be empty");
  if (payloads.size() != units.size()) {
    throw InvalidArgumentError("run_session: need exactly one payload per unit");
  }
  SessionSetup setup;
  setup.num_units = static_cast<int>(units.size());
  setup.payload_bits = static_cast<int>(payloads[0].size());
  if (setup.payload_bits < 1) {
    throw InvalidArgumentError("run_session: payloads must not be empty");
  }
  std::vector<char> taken(grid.converters.size(), 0);
  for (std::size_t u = 0; u < units.size(); ++u) {
    const int c = units[u];
    if (c < 0 || c >= static_cast<int>(grid.converters.size())) {
      throw InvalidArgumentError("run_session: unit " + std::to_string(u) +
                                 " references converter " + std::to_string(c) +
                                 ", which does not exist");
    }
    if (taken[c]) {
      throw InvalidArgumentError("run_session: converter " + std::to_string(c) +
                                 " listed as a unit twice");
    }
    taken[c] = 1;
    if (static_cast<int>(payloads[u].size()) != setup.payload_bits) {
      throw InvalidArgumentError("run_session: payload lengths differ between units");
    }
    setup.unit_bus.push_back(grid.converters[c].bus);
  }
  for (std::size_t e = 0; e < events.size(); ++e) {
    if (events[e].bus < 0 || events[e].bus >= static_cast<int>(grid.buses.size())) {
      throw InvalidArgumentError("run_session: events[" + std::to_string(e) +
                                 "].bus out of range");
    }
    if (e > 0 && events[e].time < events[e - 1].time) {
      throw InvalidArgumentError("run_session: events must be sorted by time");
    }
  }
  return setup;
}

}  // namespace

SessionReport run_session(const GridSpec& grid, const PowerTalkParams& params,
                          const std::vector<int>& units,
                          const std::vector<BitString>& payloads,
                          const std::vector<LoadChangeEvent>& events,
                          const RngKey& rng_key, const SessionOptions& options) {
  const SessionSetup setup = check_session_inputs(grid, units, payloads, events);
  const int num_units = setup.num_units;

  // Units participate as voltage sources for the whole session; CSCs among
  // them temporarily switch mode and revert implicitly (we work on a copy).
  GridSpec session_grid = grid;
  for (int c : units) session_grid.converters[c].mode = ConverterMode::VSC;

  const TdmaSchedule schedule = build_schedule(num_units, setup.payload_bits,
                                               params.crc_enabled);
  std::vector<BitString> wire(num_units);
  for (int u = 0; u < num_units; ++u) {
    wire[u] = encode_frame(payloads[u], params.crc_enabled).wire_bits();
  }

  // One stream per unit, keyed by converter index, so results do not depend
  // on the order receivers are processed in.
  std::vector<Rng> streams;
  streams.reserve(units.size());
  for (int c : units) streams.push_back(rng_key.stream("node:" + std::to_string(c)));

  SessionReport report;
  report.overhead_wh_by_transmitter.assign(num_units, 0.0);

  const double slot_s = params.slot_duration;
  const double wh_per_slot = slot_s / 3600.0;
  std::size_t next_event = 0;
  long slots_elapsed = 0;

  // Applies every event that falls before the end of the current slot
  // window; the containing slot already sees the new load.
  auto advance_events = [&]() {
    const double window_end = static_cast<double>(slots_elapsed + 1) * slot_s;
    while (next_event < events.size() && events[next_event].time < window_end) {
      session_grid.buses[events[next_event].bus] = events[next_event].new_load;
      ++next_event;
    }
  };

  for (int attempt = 0;; ++attempt) {
    // Silent slot: re-establish the pre-phase operating point and baselines.
    advance_events();
    const SteadyState quiet = solve_steady_state(session_grid);
    const std::vector<double> p_pre = quiet.p_conv;
    std::vector<double> baseline(num_units);
    for (int u = 0; u < num_units; ++u) {
      baseline[u] = observe_slot(quiet.v[setup.unit_bus[u]], params, streams[u],
                                 setup.unit_bus[u], slots_elapsed)
                        .averaged_voltage;
    }
    ++slots_elapsed;

    // received[rx][tx] accumulates detected wire bits.
    std::vector<std::vector<BitString>> received(
        num_units, std::vector<BitString>(num_units));

    for (const SlotAssignment& slot : schedule.slot_assignments) {
      advance_events();
      const int tx = slot.transmitter;
      const int bit = wire[tx][slot.bit_position];
      const GridSpec deviated = apply_symbol(session_grid, units[tx], bit, params);
      const SteadyState state = solve_steady_state(deviated);

      double slot_overhead = 0.0;
      for (std::size_t c = 0; c < state.p_conv.size(); ++c) {
        slot_overhead += std::abs(state.p_conv[c] - p_pre[c]) * wh_per_slot;
      }
      report.energy_overhead_wh += slot_overhead;
      report.overhead_wh_by_transmitter[tx] += slot_overhead;

      std::vector<double> observations(num_units,
                                       std::numeric_limits<double>::quiet_NaN());
      std::vector<int> decisions(num_units, -1);
      for (int rx = 0; rx < num_units; ++rx) {
        if (rx == tx) continue;  // half-duplex: no detection in own sub-phase
        const SlotObservation obs = observe_slot(
            state.v[setup.unit_bus[rx]], params, streams[rx], setup.unit_bus[rx],
            slots_elapsed);
        observations[rx] = obs.averaged_voltage;
        decisions[rx] = detect_bit(obs, baseline[rx]);
        received[rx][tx].push_back(static_cast<std::uint8_t>(decisions[rx]));
      }
      if (options.slot_observer) {
        SlotRecord record;
        record.slot = slots_elapsed;
        record.transmitter = tx;
        record.bit = bit;
        record.grid = &deviated;
        record.state = &state;
        record.observations = std::move(observations);
        record.decisions = std::move(decisions);
        options.slot_observer(record);
      }
      ++slots_elapsed;
    }

    report.views.assign(num_units, std::vector<UnitView>(num_units));
    bool all_ok = true;
    for (int rx = 0; rx < num_units; ++rx) {
      for (int tx = 0; tx < num_units; ++tx) {
        UnitView& view = report.views[rx][tx];
        if (rx == tx) {
          view.payload = payloads[tx];
          view.crc_ok = true;
          continue;
        }
        const std::optional<BitString> decoded =
            decode_frame(received[rx][tx], setup.payload_bits, params.crc_enabled);
        if (decoded) {
          view.payload = *decoded;
          view.crc_ok = true;
        } else {
          view.payload.assign(received[rx][tx].begin(),
                              received[rx][tx].begin() + setup.payload_bits);
          view.crc_ok = false;
          all_ok = false;
        }
      }
    }

    if (all_ok || !params.crc_enabled) break;
    if (attempt >= options.max_retries) {
      report.aborted = true;
      break;
    }
    ++report.retries;
  }

  report.slots_elapsed = slots_elapsed;
  return report;
}

SessionReport run_session(const GridSpec& grid, const PowerTalkParams& params,
                          const std::vector<BitString>& payloads,
                          const std::vector<LoadChangeEvent>& events,
                          const RngKey& rng_key, const SessionOptions& options) {
  std::vector<int> units(grid.converters.size());
  for (std::size_t c = 0; c < units.size(); ++c) units[c] = static_cast<int>(c);
  return run_session(grid, params, units, payloads, events, rng_key, options);
}

}  // namespace powertalk
