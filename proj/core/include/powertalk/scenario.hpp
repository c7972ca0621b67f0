#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "powertalk/dispatch.hpp"
#include "powertalk/grid.hpp"
#include "powertalk/mac.hpp"
#include "powertalk/phy.hpp"
#include "powertalk/secctl.hpp"

namespace powertalk {

// One reproducible run description, loaded from a JSON file.  Keys carry
// their SI unit as a suffix ("gamma_volts", "slot_duration_seconds"), unknown
// keys are rejected, and every validation message names the offending key by
// its JSON path.  See README.md for the full schema.

struct BerConfig {
  int transmitter = 0;  // converter index sending the probe bits
  int receiver = 0;     // converter index whose bus is observed
  int num_bits = 0;     // Monte Carlo trials per amplitude
  std::vector<double> gamma_values;  // volts
};

struct DispatchAppConfig {
  std::vector<int> q_values;         // quantizer widths swept
  std::vector<double> gamma_values;  // volts
  int monte_carlo_runs = 0;
  double demand_watts = 0.0;
  double p_cap_watts = 0.0;  // capacity ceiling and quantizer full scale
  double penalty_cost_per_wh = 0.0;
  double period_duration_seconds = 0.0;
  bool price_overhead = true;
};

struct TimedJammer {
  Jammer jammer;
  // Activation time; unset means the jammer stays off until a jammer_on
  // event switches it.
  std::optional<double> active_from_seconds;
};

struct TimelineParams {
  double duration_seconds = 0.0;
  double step_seconds = 0.0;
  double powertalk_period_seconds = 0.0;
};

struct SecCtlAppConfig {
  double comm_range_meters = 0.0;
  // positions[i] belongs to converter i; DER ids in traces are i + 1.
  std::vector<DerNode> positions;
  std::vector<TimedJammer> jammers;
  int regulator_count = 0;
  double capacity_full_scale_watts = 0.0;
  SecondaryGains gains;
  TimelineParams timeline;
};

struct ScenarioEvent {
  enum class Kind { LoadChange, JammerOn, JammerOff };
  double time_seconds = 0.0;
  Kind kind = Kind::LoadChange;
  int bus = 0;            // load_change only
  BusLoad new_load;       // load_change only
  int jammer_index = 0;   // jammer_on / jammer_off only
};

struct Scenario {
  std::string description;
  std::uint64_t seed = 0;
  GridSpec grid;
  PowerTalkParams powertalk;
  std::vector<ScenarioEvent> events;
  // At most one application section is present.
  std::optional<BerConfig> ber;
  std::optional<DispatchAppConfig> dispatch;
  std::optional<SecCtlAppConfig> secctl;
};

// The subset of events a power-talk session can see, rebased so that
// `origin_seconds` becomes time zero.  Jammer events do not affect the
// electrical grid and are skipped.
std::vector<LoadChangeEvent> load_events_from(const std::vector<ScenarioEvent>& events,
                                              double origin_seconds);

// Parses, validates (structure, ranges, cross-references, grid and signaling
// invariants) and returns the scenario.  Soft findings — e.g. noise outside
// the typical band — are appended to *warnings when given.  Throws ParseError
// for malformed JSON/schema and the specific validation error otherwise.
Scenario parse_scenario(const std::string& json_text,
                        std::vector<std::string>* warnings = nullptr);

Scenario load_scenario_file(const std::string& path,
                            std::vector<std::string>* warnings = nullptr);

// Canonical form: every applicable key written explicitly (defaults
// materialized), object keys sorted, two-space indent, trailing newline.
// parse(canonical(s)) == s, and canonical output is a byte-stable fixpoint.
std::string canonical_scenario_json(const Scenario& scenario);

}  // namespace powertalk
