#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "powertalk/errors.hpp"
#include "powertalk/grid.hpp"
#include "powertalk/mac.hpp"
#include "powertalk/phy.hpp"
#include "powertalk/rng.hpp"

using namespace powertalk;

namespace {

// Independent checksum oracle: plain polynomial long division over the
// message bits followed by eight zero bits, divisor x^8 + x^2 + x + 1.
std::uint8_t crc8_longdiv(const std::vector<std::uint8_t>& bytes) {
  std::vector<int> bits;
  for (std::uint8_t b : bytes)
    for (int i = 7; i >= 0; --i) bits.push_back((b >> i) & 1);
  for (int i = 0; i < 8; ++i) bits.push_back(0);
  const int poly[9] = {1, 0, 0, 0, 0, 0, 1, 1, 1};
  for (std::size_t i = 0; i + 9 <= bits.size(); ++i)
    if (bits[i])
      for (int j = 0; j < 9; ++j) bits[i + j] ^= poly[j];
  std::uint8_t r = 0;
  for (std::size_t i = bits.size() - 8; i < bits.size(); ++i)
    r = static_cast<std::uint8_t>((r << 1) | bits[i]);
  return r;
}

Converter vsc(int bus, double x, double r_d) {
  Converter c;
  c.bus = bus;
  c.reference_voltage = x;
  c.virtual_resistance = r_d;
  c.p_max = 500.0;
  c.incremental_cost = 1.0;
  c.constraints = {44.0, 52.0, 0.01, 1.0};
  return c;
}

GridSpec one_bus_pair() {
  GridSpec g;
  g.rated_voltage = 48.0;
  g.buses = {BusLoad{0.0, 0.0, 300.0}};
  g.converters = {vsc(0, 48.0, 0.1), vsc(0, 48.0, 0.2)};
  return g;
}

GridSpec two_bus_trio() {
  GridSpec g;
  g.rated_voltage = 48.0;
  g.buses = {BusLoad{50.0, 0.0, 0.0}, BusLoad{0.0, 0.0, 200.0}};
  g.converters = {vsc(0, 48.0, 0.1), vsc(0, 48.1, 0.2), vsc(1, 47.9, 0.15)};
  g.lines = {Line{0, 1, 0.5}};
  return g;
}

PowerTalkParams quiet_params(int bits, bool crc) {
  PowerTalkParams p;
  p.gamma = 0.2;
  p.slot_duration = 0.005;
  p.sampling_frequency = 50000.0;
  p.noise_sigma = 0.0;
  p.bits_per_payload = bits;
  p.crc_enabled = crc;
  return p;
}

BitString bits_of(std::initializer_list<int> raw) {
  BitString b;
  for (int v : raw) b.push_back(static_cast<std::uint8_t>(v));
  return b;
}

}  // namespace

TEST_SUITE("mac") {

TEST_CASE("checksum matches a long-division oracle") {
  // The classic check string for this polynomial.
  const std::uint8_t check[9] = {'1', '2', '3', '4', '5', '6', '7', '8', '9'};
  CHECK(crc8(check, 9) == 0xF4);
  CHECK(crc8_longdiv({'1', '2', '3', '4', '5', '6', '7', '8', '9'}) == 0xF4);

  const std::uint8_t zeros[4] = {0, 0, 0, 0};
  CHECK(crc8(zeros, 4) == 0x00);

  Rng rng = derive_substream(11, "crc-oracle");
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> msg(1 + static_cast<std::size_t>(rng.below(16)));
    for (auto& b : msg) b = static_cast<std::uint8_t>(rng.below(256));
    CHECK(crc8(msg.data(), msg.size()) == crc8_longdiv(msg));
  }
}

TEST_CASE("bit-level checksum left-pads the payload to whole bytes") {
  // {1,0,1,1} padded left with four zeros packs to the byte 0x0B.
  const BitString payload = bits_of({1, 0, 1, 1});
  const BitString got = crc8_bits(payload);
  const std::uint8_t want = crc8_longdiv({0x0B});
  REQUIRE(got.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(got[static_cast<std::size_t>(i)] == ((want >> (7 - i)) & 1));

  // Twelve bits span two bytes: {0000 1111, 0000 0101}.
  const BitString wide = bits_of({1, 1, 1, 1, 0, 0, 0, 0, 0, 1, 0, 1});
  const BitString got_wide = crc8_bits(wide);
  const std::uint8_t want_wide = crc8_longdiv({0x0F, 0x05});
  for (int i = 0; i < 8; ++i)
    CHECK(got_wide[static_cast<std::size_t>(i)] == ((want_wide >> (7 - i)) & 1));
}

TEST_CASE("frames survive the encode/decode round trip") {
  Rng rng = derive_substream(12, "frames");
  for (int trial = 0; trial < 100; ++trial) {
    const int q = 1 + static_cast<int>(rng.below(16));
    BitString payload(static_cast<std::size_t>(q));
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng.below(2));

    for (bool crc : {false, true}) {
      const Frame f = encode_frame(payload, crc);
      CHECK(f.payload_bits == payload);
      CHECK(f.crc_bits.size() == (crc ? 8u : 0u));
      const BitString wire = f.wire_bits();
      CHECK(static_cast<int>(wire.size()) == q + (crc ? 8 : 0));
      const auto back = decode_frame(wire, q, crc);
      REQUIRE(back.has_value());
      CHECK(*back == payload);
    }
  }
}

TEST_CASE("single bit flips are caught when the checksum is on") {
  const BitString payload = bits_of({1, 0, 1, 1, 0, 0, 1});
  const Frame f = encode_frame(payload, true);
  const BitString wire = f.wire_bits();
  for (std::size_t i = 0; i < wire.size(); ++i) {
    BitString flipped = wire;
    flipped[i] ^= 1;
    CHECK_FALSE(decode_frame(flipped, 7, true).has_value());
  }
  // Without a checksum nothing is verified: the flip silently goes through.
  const Frame bare = encode_frame(payload, false);
  BitString flipped = bare.wire_bits();
  flipped[0] ^= 1;
  const auto got = decode_frame(flipped, 7, false);
  REQUIRE(got.has_value());
  CHECK((*got)[0] == 0);
}

TEST_CASE("schedule hands each unit one contiguous block") {
  const TdmaSchedule s = build_schedule(3, 4, true);
  CHECK(s.num_units == 3);
  CHECK(s.frame_bits() == 12);
  CHECK(s.total_slots() == 36);
  for (int i = 0; i < 36; ++i) {
    CHECK(s.slot_assignments[static_cast<std::size_t>(i)].transmitter == i / 12);
    CHECK(s.slot_assignments[static_cast<std::size_t>(i)].bit_position == i % 12);
  }
  const TdmaSchedule bare = build_schedule(3, 4, false);
  CHECK(bare.frame_bits() == 4);
  CHECK(bare.total_slots() == 12);
}

TEST_CASE("quiet sessions recover every payload exactly") {
  const GridSpec g = two_bus_trio();
  const std::vector<BitString> payloads = {
      bits_of({1, 0, 1, 1, 0}),
      bits_of({0, 0, 0, 0, 0}),
      bits_of({1, 1, 1, 1, 1}),
  };
  for (bool crc : {false, true}) {
    const PowerTalkParams p = quiet_params(5, crc);
    const SessionReport r = run_session(g, p, payloads, {}, RngKey{42, "quiet"});
    CHECK(r.retries == 0);
    CHECK_FALSE(r.aborted);
    CHECK(r.slots_elapsed == 3 * (5 + (crc ? 8 : 0)) + 1);
    REQUIRE(r.views.size() == 3);
    for (std::size_t rx = 0; rx < 3; ++rx) {
      REQUIRE(r.views[rx].size() == 3);
      for (std::size_t tx = 0; tx < 3; ++tx) {
        CHECK(r.views[rx][tx].payload == payloads[tx]);
        CHECK(r.views[rx][tx].crc_ok);
      }
    }
    CHECK(r.energy_overhead_wh > 0.0);
    REQUIRE(r.overhead_wh_by_transmitter.size() == 3);
    const double sum = std::accumulate(r.overhead_wh_by_transmitter.begin(),
                                       r.overhead_wh_by_transmitter.end(), 0.0);
    CHECK(sum == doctest::Approx(r.energy_overhead_wh).epsilon(1e-9));
  }
}

TEST_CASE("subset sessions leave other converters out") {
  const GridSpec g = two_bus_trio();
  const PowerTalkParams p = quiet_params(4, true);
  const std::vector<BitString> payloads = {bits_of({1, 0, 0, 1}), bits_of({0, 1, 1, 0})};
  const SessionReport r =
      run_session(g, p, {0, 2}, payloads, {}, RngKey{42, "subset"});
  CHECK(r.slots_elapsed == 2 * 12 + 1);
  REQUIRE(r.views.size() == 2);
  CHECK(r.views[0][1].payload == payloads[1]);
  CHECK(r.views[1][0].payload == payloads[0]);
  // A unit's view of itself is its own payload, not a detection result.
  CHECK(r.views[0][0].payload == payloads[0]);
  CHECK(r.views[1][1].payload == payloads[1]);
}

TEST_CASE("mid-session load change triggers one full retry") {
  const GridSpec g = one_bus_pair();
  const PowerTalkParams p = quiet_params(4, true);
  const std::vector<BitString> payloads = {bits_of({1, 1, 1, 1}), bits_of({1, 0, 1, 0})};
  // One attempt is 2 * 12 data slots plus the baseline slot.
  LoadChangeEvent ev;
  ev.time = 5.5 * p.slot_duration;  // inside the first transmitter's block
  ev.bus = 0;
  ev.new_load = BusLoad{400.0, 0.0, 300.0};
  const SessionReport r = run_session(g, p, payloads, {ev}, RngKey{42, "retry"});
  CHECK(r.retries == 1);
  CHECK_FALSE(r.aborted);
  CHECK(r.slots_elapsed == 2 * 25);
  for (std::size_t rx = 0; rx < 2; ++rx)
    for (std::size_t tx = 0; tx < 2; ++tx) {
      CHECK(r.views[rx][tx].payload == payloads[tx]);
      CHECK(r.views[rx][tx].crc_ok);
    }
}

TEST_CASE("a load change in every attempt aborts the session") {
  const GridSpec g = one_bus_pair();
  const PowerTalkParams p = quiet_params(4, true);
  const std::vector<BitString> payloads = {bits_of({1, 1, 1, 1}), bits_of({1, 0, 1, 0})};
  const BusLoad heavy{400.0, 0.0, 300.0};
  const BusLoad light{0.0, 0.0, 300.0};
  std::vector<LoadChangeEvent> events;
  for (int attempt = 0; attempt < 4; ++attempt) {
    LoadChangeEvent ev;
    ev.time = (attempt * 25 + 5.5) * p.slot_duration;
    ev.bus = 0;
    ev.new_load = (attempt % 2 == 0) ? heavy : light;
    events.push_back(ev);
  }
  const SessionReport r = run_session(g, p, payloads, events, RngKey{42, "abort"});
  CHECK(r.retries == 3);
  CHECK(r.aborted);
  CHECK(r.slots_elapsed == 4 * 25);
}

TEST_CASE("without a checksum the corruption goes unnoticed") {
  const GridSpec g = one_bus_pair();
  const PowerTalkParams p = quiet_params(4, false);
  const std::vector<BitString> payloads = {bits_of({1, 1, 1, 1}), bits_of({1, 1, 1, 1})};
  LoadChangeEvent ev;
  ev.time = 2.5 * p.slot_duration;
  ev.bus = 0;
  ev.new_load = BusLoad{400.0, 0.0, 300.0};
  const SessionReport r = run_session(g, p, payloads, {ev}, RngKey{42, "blind"});
  CHECK(r.retries == 0);
  CHECK_FALSE(r.aborted);
  // The heavier load drags the bus low, so the tail of frame 0 reads as zeros.
  CHECK(r.views[1][0].payload != payloads[0]);
}

TEST_CASE("slot observer sees every data slot in order") {
  const GridSpec g = two_bus_trio();
  const PowerTalkParams p = quiet_params(3, true);
  const std::vector<BitString> payloads = {bits_of({1, 0, 1}), bits_of({0, 1, 0}),
                                           bits_of({1, 1, 0})};
  std::vector<long> slots;
  std::vector<int> transmitters;
  int nan_observations = 0;
  int muted_decisions = 0;
  SessionOptions opts;
  opts.slot_observer = [&](const SlotRecord& rec) {
    slots.push_back(rec.slot);
    transmitters.push_back(rec.transmitter);
    REQUIRE(rec.grid != nullptr);
    REQUIRE(rec.state != nullptr);
    REQUIRE(rec.observations.size() == 3);
    REQUIRE(rec.decisions.size() == 3);
    const auto tx = static_cast<std::size_t>(rec.transmitter);
    if (std::isnan(rec.observations[tx])) ++nan_observations;
    if (rec.decisions[tx] == -1) ++muted_decisions;
  };
  const SessionReport r =
      run_session(g, p, payloads, {}, RngKey{42, "observer"}, opts);
  CHECK_FALSE(r.aborted);
  const int data_slots = 3 * 11;
  REQUIRE(static_cast<int>(slots.size()) == data_slots);
  CHECK(nan_observations == data_slots);
  CHECK(muted_decisions == data_slots);
  for (std::size_t i = 1; i < slots.size(); ++i) CHECK(slots[i] == slots[i - 1] + 1);
  // Baseline occupies slot 0; unit k owns the k-th block of 11 data slots.
  CHECK(slots.front() == 1);
  for (std::size_t i = 0; i < transmitters.size(); ++i)
    CHECK(transmitters[i] == static_cast<int>(i) / 11);
}

TEST_CASE("identical keys reproduce a noisy session bit for bit") {
  const GridSpec g = two_bus_trio();
  PowerTalkParams p = quiet_params(6, true);
  p.noise_sigma = 0.05;  // noisy enough that detection is not a foregone conclusion
  const std::vector<BitString> payloads = {bits_of({1, 0, 1, 1, 0, 1}),
                                           bits_of({0, 1, 1, 0, 0, 1}),
                                           bits_of({1, 1, 0, 0, 1, 0})};
  const SessionReport a = run_session(g, p, payloads, {}, RngKey{7, "repro"});
  const SessionReport b = run_session(g, p, payloads, {}, RngKey{7, "repro"});
  CHECK(a.retries == b.retries);
  CHECK(a.slots_elapsed == b.slots_elapsed);
  for (std::size_t rx = 0; rx < 3; ++rx)
    for (std::size_t tx = 0; tx < 3; ++tx) {
      CHECK(a.views[rx][tx].payload == b.views[rx][tx].payload);
      CHECK(a.views[rx][tx].crc_ok == b.views[rx][tx].crc_ok);
    }
}

}  // TEST_SUITE
