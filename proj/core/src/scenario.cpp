#include "powertalk/scenario.hpp"

#include <algorithm>
#include <climits>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "powertalk/errors.hpp"

namespace powertalk {

namespace {

using nlohmann::json;

[[noreturn]] void fail_parse(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

[[noreturn]] void fail_value(const std::string& path, const std::string& what) {
  throw InvalidParameterError(path + ": " + what);
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail_parse(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail_parse(path, "expected an integer");
  const std::int64_t i = v.get<std::int64_t>();
  if (i < INT_MIN || i > INT_MAX) fail_parse(path, "integer out of range");
  return static_cast<int>(i);
}

std::uint64_t as_u64(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const std::int64_t i = v.get<std::int64_t>();
    if (i >= 0) return static_cast<std::uint64_t>(i);
  }
  fail_parse(path, "expected an unsigned integer");
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail_parse(path, "expected a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail_parse(path, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail_parse(path, "expected an array");
  return v;
}

// Typed access to one JSON object; tracks which keys were consumed so that
// done() can reject unknown ones with their full path.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail_parse(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& req(const std::string& key) {
    const json* v = get(key);
    if (!v) fail_parse(path_, "missing required key '" + key + "'");
    return *v;
  }

  double number(const std::string& key) { return as_number(req(key), at(key)); }
  double number_or(const std::string& key, double fallback) {
    const json* v = get(key);
    return v ? as_number(*v, at(key)) : fallback;
  }
  int integer(const std::string& key) { return as_int(req(key), at(key)); }
  bool boolean(const std::string& key) { return as_bool(req(key), at(key)); }
  bool boolean_or(const std::string& key, bool fallback) {
    const json* v = get(key);
    return v ? as_bool(*v, at(key)) : fallback;
  }
  std::string text(const std::string& key) { return as_string(req(key), at(key)); }
  std::string text_or(const std::string& key, const std::string& fallback) {
    const json* v = get(key);
    return v ? as_string(*v, at(key)) : fallback;
  }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail_parse(path_ + "." + it.key(), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

BusLoad parse_load(Obj& obj) {
  BusLoad load;
  load.d_cp = obj.number_or("d_cp_watts", 0.0);
  load.d_cc = obj.number_or("d_cc_watts", 0.0);
  load.d_ca = obj.number_or("d_ca_watts", 0.0);
  if (load.d_cp < 0.0) fail_value(obj.at("d_cp_watts"), "must be >= 0");
  if (load.d_cc < 0.0) fail_value(obj.at("d_cc_watts"), "must be >= 0");
  if (load.d_ca < 0.0) fail_value(obj.at("d_ca_watts"), "must be >= 0");
  return load;
}

GridSpec parse_grid(const json& j, const std::string& path) {
  Obj obj(j, path);
  GridSpec grid;
  grid.rated_voltage = obj.number("rated_voltage_volts");

  const json& buses = as_array(obj.req("buses"), obj.at("buses"));
  for (std::size_t b = 0; b < buses.size(); ++b) {
    Obj bus(buses[b], obj.at("buses[" + std::to_string(b) + "]"));
    grid.buses.push_back(parse_load(bus));
    bus.done();
  }

  const json& lines = as_array(obj.req("lines"), obj.at("lines"));
  for (std::size_t l = 0; l < lines.size(); ++l) {
    Obj line(lines[l], obj.at("lines[" + std::to_string(l) + "]"));
    Line parsed;
    parsed.bus_a = line.integer("bus_a");
    parsed.bus_b = line.integer("bus_b");
    parsed.resistance = line.number("resistance_ohms");
    line.done();
    grid.lines.push_back(parsed);
  }

  const json& converters = as_array(obj.req("converters"), obj.at("converters"));
  for (std::size_t c = 0; c < converters.size(); ++c) {
    Obj conv(converters[c], obj.at("converters[" + std::to_string(c) + "]"));
    Converter parsed;
    parsed.bus = conv.integer("bus");
    const std::string mode = conv.text("mode");
    if (mode == "voltage_source") {
      parsed.mode = ConverterMode::VSC;
    } else if (mode == "current_source") {
      parsed.mode = ConverterMode::CSC;
    } else {
      fail_parse(conv.at("mode"),
                 "expected \"voltage_source\" or \"current_source\"");
    }
    parsed.reference_voltage = conv.number("reference_voltage_volts");
    parsed.virtual_resistance = conv.number("virtual_resistance_ohms");
    parsed.p_max = conv.number("p_max_watts");
    parsed.incremental_cost = conv.number("incremental_cost_per_wh");
    Obj box(conv.req("constraints"), conv.at("constraints"));
    parsed.constraints.x_min = box.number("x_min_volts");
    parsed.constraints.x_max = box.number("x_max_volts");
    parsed.constraints.r_d_min = box.number("r_d_min_ohms");
    parsed.constraints.r_d_max = box.number("r_d_max_ohms");
    box.done();
    conv.done();
    grid.converters.push_back(parsed);
  }
  obj.done();
  return grid;
}

PowerTalkParams parse_powertalk(const json& j, const std::string& path) {
  Obj obj(j, path);
  PowerTalkParams params;
  params.gamma = obj.number("gamma_volts");
  params.slot_duration = obj.number("slot_duration_seconds");
  params.sampling_frequency = obj.number("sampling_frequency_hz");
  params.noise_sigma = obj.number("noise_sigma_volts");
  params.bits_per_payload = obj.integer("bits_per_payload");
  params.crc_enabled = obj.boolean("crc_enabled");
  const std::string modulation = obj.text_or("modulation", "reference_voltage");
  if (modulation == "reference_voltage") {
    params.modulation = Modulation::ReferenceVoltage;
  } else if (modulation == "virtual_resistance") {
    params.modulation = Modulation::VirtualResistance;
  } else {
    fail_parse(obj.at("modulation"),
               "expected \"reference_voltage\" or \"virtual_resistance\"");
  }
  obj.done();
  return params;
}

std::vector<ScenarioEvent> parse_events(const json& j, const std::string& path,
                                        const GridSpec& grid) {
  std::vector<ScenarioEvent> events;
  const json& arr = as_array(j, path);
  for (std::size_t e = 0; e < arr.size(); ++e) {
    const std::string entry_path = path + "[" + std::to_string(e) + "]";
    Obj obj(arr[e], entry_path);
    ScenarioEvent event;
    event.time_seconds = obj.number("time_seconds");
    if (event.time_seconds < 0.0) fail_value(obj.at("time_seconds"), "must be >= 0");
    const std::string kind = obj.text("kind");
    if (kind == "load_change") {
      event.kind = ScenarioEvent::Kind::LoadChange;
      event.bus = obj.integer("bus");
      if (event.bus < 0 || event.bus >= static_cast<int>(grid.buses.size())) {
        fail_value(obj.at("bus"), "bus index out of range");
      }
      event.new_load = parse_load(obj);
    } else if (kind == "jammer_on" || kind == "jammer_off") {
      event.kind = kind == "jammer_on" ? ScenarioEvent::Kind::JammerOn
                                       : ScenarioEvent::Kind::JammerOff;
      event.jammer_index = obj.integer("index");
    } else {
      fail_parse(obj.at("kind"),
                 "expected \"load_change\", \"jammer_on\" or \"jammer_off\"");
    }
    obj.done();
    if (e > 0 && event.time_seconds < events.back().time_seconds) {
      fail_value(entry_path + ".time_seconds", "events must be sorted by time");
    }
    events.push_back(event);
  }
  return events;
}

BerConfig parse_ber(const json& j, const std::string& path, const GridSpec& grid) {
  Obj obj(j, path);
  BerConfig ber;
  ber.transmitter = obj.integer("transmitter");
  ber.receiver = obj.integer("receiver");
  ber.num_bits = obj.integer("num_bits");
  const json& gammas = as_array(obj.req("gamma_values_volts"),
                                obj.at("gamma_values_volts"));
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const std::string p = obj.at("gamma_values_volts[" + std::to_string(i) + "]");
    const double g = as_number(gammas[i], p);
    if (!(g > 0.0)) fail_value(p, "must be > 0");
    ber.gamma_values.push_back(g);
  }
  obj.done();

  const int n = static_cast<int>(grid.converters.size());
  if (ber.transmitter < 0 || ber.transmitter >= n) {
    fail_value(path + ".transmitter", "converter index out of range");
  }
  if (ber.receiver < 0 || ber.receiver >= n) {
    fail_value(path + ".receiver", "converter index out of range");
  }
  if (ber.transmitter == ber.receiver) {
    fail_value(path + ".receiver", "must differ from transmitter");
  }
  if (grid.converters[ber.transmitter].mode != ConverterMode::VSC) {
    fail_value(path + ".transmitter", "must be a voltage_source converter");
  }
  if (ber.num_bits < 1) fail_value(path + ".num_bits", "must be >= 1");
  if (ber.gamma_values.empty()) {
    fail_value(path + ".gamma_values_volts", "must not be empty");
  }
  return ber;
}

DispatchAppConfig parse_dispatch(const json& j, const std::string& path,
                                 const GridSpec& grid,
                                 std::vector<std::string>* warnings) {
  Obj obj(j, path);
  DispatchAppConfig cfg;
  const json& qs = as_array(obj.req("q_values"), obj.at("q_values"));
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const std::string p = obj.at("q_values[" + std::to_string(i) + "]");
    const int q = as_int(qs[i], p);
    if (q < 1 || q > 30) fail_value(p, "must be in [1, 30]");
    cfg.q_values.push_back(q);
  }
  const json& gammas = as_array(obj.req("gamma_values_volts"),
                                obj.at("gamma_values_volts"));
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const std::string p = obj.at("gamma_values_volts[" + std::to_string(i) + "]");
    const double g = as_number(gammas[i], p);
    if (!(g > 0.0)) fail_value(p, "must be > 0");
    cfg.gamma_values.push_back(g);
  }
  cfg.monte_carlo_runs = obj.integer("monte_carlo_runs");
  cfg.demand_watts = obj.number("demand_watts");
  cfg.p_cap_watts = obj.number("p_cap_watts");
  cfg.penalty_cost_per_wh = obj.number("penalty_cost_per_wh");
  cfg.period_duration_seconds = obj.number("period_duration_seconds");
  cfg.price_overhead = obj.boolean_or("price_overhead", true);
  obj.done();

  if (cfg.q_values.empty()) fail_value(path + ".q_values", "must not be empty");
  if (cfg.gamma_values.empty()) {
    fail_value(path + ".gamma_values_volts", "must not be empty");
  }
  if (cfg.monte_carlo_runs < 1) fail_value(path + ".monte_carlo_runs", "must be >= 1");
  if (!(cfg.demand_watts > 0.0)) fail_value(path + ".demand_watts", "must be > 0");
  if (!(cfg.p_cap_watts > 0.0)) fail_value(path + ".p_cap_watts", "must be > 0");
  if (grid.converters.size() < 2) {
    fail_value(path, "dispatch needs at least two converters");
  }
  double max_cost = 0.0;
  for (std::size_t c = 0; c < grid.converters.size(); ++c) {
    const double cost = grid.converters[c].incremental_cost;
    if (c > 0 && !(cost > grid.converters[c - 1].incremental_cost)) {
      fail_value("scenario.grid.converters[" + std::to_string(c) +
                     "].incremental_cost_per_wh",
                 "dispatch requires strictly increasing costs across converters");
    }
    max_cost = std::max(max_cost, cost);
  }
  if (!(cfg.penalty_cost_per_wh > max_cost)) {
    fail_value(path + ".penalty_cost_per_wh",
               "must exceed the largest incremental cost");
  }
  if (!(cfg.period_duration_seconds > 0.0)) {
    fail_value(path + ".period_duration_seconds", "must be > 0");
  }
  if (warnings &&
      (cfg.period_duration_seconds < 300.0 || cfg.period_duration_seconds > 1800.0)) {
    warnings->push_back(path + ".period_duration_seconds: dispatch rounds usually "
                        "repeat every 5-30 minutes");
  }
  return cfg;
}

SecCtlAppConfig parse_secctl(const json& j, const std::string& path,
                             const GridSpec& grid) {
  Obj obj(j, path);
  SecCtlAppConfig cfg;
  cfg.comm_range_meters = obj.number("comm_range_meters");
  if (!(cfg.comm_range_meters > 0.0)) {
    fail_value(path + ".comm_range_meters", "must be > 0");
  }

  const json& positions = as_array(obj.req("positions"), obj.at("positions"));
  for (std::size_t i = 0; i < positions.size(); ++i) {
    Obj pos(positions[i], obj.at("positions[" + std::to_string(i) + "]"));
    DerNode node;
    node.x = pos.number("x_meters");
    node.y = pos.number("y_meters");
    pos.done();
    cfg.positions.push_back(node);
  }
  if (cfg.positions.size() != grid.converters.size()) {
    fail_value(path + ".positions", "need exactly one position per converter (got " +
                                        std::to_string(cfg.positions.size()) +
                                        " for " +
                                        std::to_string(grid.converters.size()) +
                                        " converters)");
  }
  if (cfg.positions.size() > 16) {
    fail_value(path + ".positions", "at most 16 nodes are supported");
  }
  for (std::size_t c = 0; c < grid.converters.size(); ++c) {
    cfg.positions[c].capacity_watts = grid.converters[c].p_max;
    if (!(grid.converters[c].p_max > 0.0)) {
      fail_value("scenario.grid.converters[" + std::to_string(c) + "].p_max_watts",
                 "secondary control needs positive capacities");
    }
  }

  if (const json* jams = obj.get("jammers")) {
    const json& arr = as_array(*jams, obj.at("jammers"));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj jam(arr[i], obj.at("jammers[" + std::to_string(i) + "]"));
      TimedJammer timed;
      timed.jammer.x = jam.number("x_meters");
      timed.jammer.y = jam.number("y_meters");
      timed.jammer.radius = jam.number("radius_meters");
      if (timed.jammer.radius < 0.0) {
        fail_value(jam.at("radius_meters"), "must be >= 0");
      }
      if (jam.has("active_from_seconds")) {
        timed.active_from_seconds = jam.number("active_from_seconds");
        if (*timed.active_from_seconds < 0.0) {
          fail_value(jam.at("active_from_seconds"), "must be >= 0");
        }
      }
      jam.done();
      cfg.jammers.push_back(timed);
    }
  }

  cfg.regulator_count = obj.integer("regulator_count");
  if (cfg.regulator_count < 1 ||
      cfg.regulator_count > static_cast<int>(cfg.positions.size())) {
    fail_value(path + ".regulator_count",
               "must be in [1, " + std::to_string(cfg.positions.size()) + "]");
  }
  cfg.capacity_full_scale_watts = obj.number("capacity_full_scale_watts");
  if (!(cfg.capacity_full_scale_watts > 0.0)) {
    fail_value(path + ".capacity_full_scale_watts", "must be > 0");
  }

  if (const json* gains = obj.get("gains")) {
    Obj g(*gains, obj.at("gains"));
    cfg.gains.epsilon = g.number_or("epsilon", cfg.gains.epsilon);
    cfg.gains.k_v = g.number_or("k_v", cfg.gains.k_v);
    cfg.gains.k_c = g.number_or("k_c", cfg.gains.k_c);
    g.done();
    if (!(cfg.gains.epsilon > 0.0) || cfg.gains.epsilon > 1.0) {
      fail_value(obj.at("gains") + ".epsilon", "must be in (0, 1]");
    }
    if (cfg.gains.k_v < 0.0) fail_value(obj.at("gains") + ".k_v", "must be >= 0");
    if (cfg.gains.k_c < 0.0) fail_value(obj.at("gains") + ".k_c", "must be >= 0");
  }

  Obj timeline(obj.req("timeline"), obj.at("timeline"));
  cfg.timeline.duration_seconds = timeline.number("duration_seconds");
  cfg.timeline.step_seconds = timeline.number("step_seconds");
  cfg.timeline.powertalk_period_seconds = timeline.number("powertalk_period_seconds");
  timeline.done();
  if (!(cfg.timeline.duration_seconds > 0.0)) {
    fail_value(obj.at("timeline") + ".duration_seconds", "must be > 0");
  }
  if (!(cfg.timeline.step_seconds > 0.0) ||
      cfg.timeline.step_seconds > cfg.timeline.duration_seconds) {
    fail_value(obj.at("timeline") + ".step_seconds", "must be in (0, duration]");
  }
  if (!(cfg.timeline.powertalk_period_seconds > 0.0)) {
    fail_value(obj.at("timeline") + ".powertalk_period_seconds", "must be > 0");
  }
  obj.done();
  return cfg;
}

}  // namespace

std::vector<LoadChangeEvent> load_events_from(const std::vector<ScenarioEvent>& events,
                                              double origin_seconds) {
  std::vector<LoadChangeEvent> out;
  for (const ScenarioEvent& event : events) {
    if (event.kind != ScenarioEvent::Kind::LoadChange) continue;
    if (event.time_seconds < origin_seconds) continue;
    out.push_back({event.time_seconds - origin_seconds, event.bus, event.new_load});
  }
  return out;
}

Scenario parse_scenario(const std::string& json_text,
                        std::vector<std::string>* warnings) {
  json root_json;
  try {
    root_json = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("scenario: invalid JSON: " + std::string(e.what()));
  }

  Obj root(root_json, "scenario");
  Scenario scenario;
  scenario.description = root.text_or("description", "");
  if (const json* seed = root.get("seed")) {
    scenario.seed = as_u64(*seed, root.at("seed"));
  }
  scenario.grid = parse_grid(root.req("grid"), root.at("grid"));
  validate_grid(scenario.grid, "scenario.grid");

  scenario.powertalk = parse_powertalk(root.req("powertalk"), root.at("powertalk"));
  {
    std::vector<std::string> soft =
        validate_params(scenario.powertalk, scenario.grid, "scenario.powertalk");
    if (warnings) {
      warnings->insert(warnings->end(), soft.begin(), soft.end());
    }
  }

  if (const json* events = root.get("events")) {
    scenario.events = parse_events(*events, root.at("events"), scenario.grid);
  }

  if (const json* app = root.get("application")) {
    Obj application(*app, root.at("application"));
    int variants = 0;
    if (const json* ber = application.get("ber")) {
      scenario.ber = parse_ber(*ber, application.at("ber"), scenario.grid);
      ++variants;
    }
    if (const json* dispatch = application.get("dispatch")) {
      scenario.dispatch = parse_dispatch(*dispatch, application.at("dispatch"),
                                         scenario.grid, warnings);
      ++variants;
    }
    if (const json* secctl = application.get("secctl")) {
      scenario.secctl =
          parse_secctl(*secctl, application.at("secctl"), scenario.grid);
      ++variants;
    }
    application.done();
    if (variants != 1) {
      fail_parse(root.at("application"),
                 "exactly one of 'ber', 'dispatch', 'secctl' required");
    }
  }
  root.done();

  // Jammer events only make sense against a secctl application's jammers.
  for (std::size_t e = 0; e < scenario.events.size(); ++e) {
    const ScenarioEvent& event = scenario.events[e];
    if (event.kind == ScenarioEvent::Kind::LoadChange) continue;
    const std::string p = "scenario.events[" + std::to_string(e) + "].index";
    if (!scenario.secctl) {
      fail_value(p, "jammer events require a secctl application");
    }
    if (event.jammer_index < 0 ||
        event.jammer_index >= static_cast<int>(scenario.secctl->jammers.size())) {
      fail_value(p, "jammer index out of range");
    }
  }

  // Per-cell amplitudes must respect every potential transmitter's
  // constraint box, like the headline gamma does.
  if (scenario.dispatch) {
    for (double gamma : scenario.dispatch->gamma_values) {
      PowerTalkParams probe = scenario.powertalk;
      probe.gamma = gamma;
      validate_params(probe, scenario.grid,
                      "scenario.application.dispatch.gamma_values_volts");
    }
  }
  if (scenario.ber) {
    for (double gamma : scenario.ber->gamma_values) {
      PowerTalkParams probe = scenario.powertalk;
      probe.gamma = gamma;
      validate_params(probe, scenario.grid,
                      "scenario.application.ber.gamma_values_volts");
    }
  }
  return scenario;
}

Scenario load_scenario_file(const std::string& path,
                            std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("scenario file '" + path + "': cannot open");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("scenario file '" + path + "': read failed");
  return parse_scenario(text.str(), warnings);
}

namespace {

json dump_load(const BusLoad& load) {
  json j;
  j["d_cp_watts"] = load.d_cp;
  j["d_cc_watts"] = load.d_cc;
  j["d_ca_watts"] = load.d_ca;
  return j;
}

}  // namespace

std::string canonical_scenario_json(const Scenario& scenario) {
  json root;
  root["description"] = scenario.description;
  root["seed"] = scenario.seed;

  json grid;
  grid["rated_voltage_volts"] = scenario.grid.rated_voltage;
  grid["buses"] = json::array();
  for (const BusLoad& load : scenario.grid.buses) {
    grid["buses"].push_back(dump_load(load));
  }
  grid["lines"] = json::array();
  for (const Line& line : scenario.grid.lines) {
    json j;
    j["bus_a"] = line.bus_a;
    j["bus_b"] = line.bus_b;
    j["resistance_ohms"] = line.resistance;
    grid["lines"].push_back(j);
  }
  grid["converters"] = json::array();
  for (const Converter& conv : scenario.grid.converters) {
    json j;
    j["bus"] = conv.bus;
    j["mode"] = conv.mode == ConverterMode::VSC ? "voltage_source" : "current_source";
    j["reference_voltage_volts"] = conv.reference_voltage;
    j["virtual_resistance_ohms"] = conv.virtual_resistance;
    j["p_max_watts"] = conv.p_max;
    j["incremental_cost_per_wh"] = conv.incremental_cost;
    json box;
    box["x_min_volts"] = conv.constraints.x_min;
    box["x_max_volts"] = conv.constraints.x_max;
    box["r_d_min_ohms"] = conv.constraints.r_d_min;
    box["r_d_max_ohms"] = conv.constraints.r_d_max;
    j["constraints"] = box;
    grid["converters"].push_back(j);
  }
  root["grid"] = grid;

  json talk;
  talk["gamma_volts"] = scenario.powertalk.gamma;
  talk["slot_duration_seconds"] = scenario.powertalk.slot_duration;
  talk["sampling_frequency_hz"] = scenario.powertalk.sampling_frequency;
  talk["noise_sigma_volts"] = scenario.powertalk.noise_sigma;
  talk["bits_per_payload"] = scenario.powertalk.bits_per_payload;
  talk["crc_enabled"] = scenario.powertalk.crc_enabled;
  talk["modulation"] = scenario.powertalk.modulation == Modulation::ReferenceVoltage
                           ? "reference_voltage"
                           : "virtual_resistance";
  root["powertalk"] = talk;

  root["events"] = json::array();
  for (const ScenarioEvent& event : scenario.events) {
    json j;
    j["time_seconds"] = event.time_seconds;
    switch (event.kind) {
      case ScenarioEvent::Kind::LoadChange: {
        j["kind"] = "load_change";
        j["bus"] = event.bus;
        const json load = dump_load(event.new_load);
        j.update(load);
        break;
      }
      case ScenarioEvent::Kind::JammerOn:
        j["kind"] = "jammer_on";
        j["index"] = event.jammer_index;
        break;
      case ScenarioEvent::Kind::JammerOff:
        j["kind"] = "jammer_off";
        j["index"] = event.jammer_index;
        break;
    }
    root["events"].push_back(j);
  }

  if (scenario.ber || scenario.dispatch || scenario.secctl) {
    json app;
    if (scenario.ber) {
      json j;
      j["transmitter"] = scenario.ber->transmitter;
      j["receiver"] = scenario.ber->receiver;
      j["num_bits"] = scenario.ber->num_bits;
      j["gamma_values_volts"] = scenario.ber->gamma_values;
      app["ber"] = j;
    }
    if (scenario.dispatch) {
      const DispatchAppConfig& cfg = *scenario.dispatch;
      json j;
      j["q_values"] = cfg.q_values;
      j["gamma_values_volts"] = cfg.gamma_values;
      j["monte_carlo_runs"] = cfg.monte_carlo_runs;
      j["demand_watts"] = cfg.demand_watts;
      j["p_cap_watts"] = cfg.p_cap_watts;
      j["penalty_cost_per_wh"] = cfg.penalty_cost_per_wh;
      j["period_duration_seconds"] = cfg.period_duration_seconds;
      j["price_overhead"] = cfg.price_overhead;
      app["dispatch"] = j;
    }
    if (scenario.secctl) {
      const SecCtlAppConfig& cfg = *scenario.secctl;
      json j;
      j["comm_range_meters"] = cfg.comm_range_meters;
      j["positions"] = json::array();
      for (const DerNode& node : cfg.positions) {
        json p;
        p["x_meters"] = node.x;
        p["y_meters"] = node.y;
        j["positions"].push_back(p);
      }
      j["jammers"] = json::array();
      for (const TimedJammer& timed : cfg.jammers) {
        json p;
        p["x_meters"] = timed.jammer.x;
        p["y_meters"] = timed.jammer.y;
        p["radius_meters"] = timed.jammer.radius;
        if (timed.active_from_seconds) {
          p["active_from_seconds"] = *timed.active_from_seconds;
        }
        j["jammers"].push_back(p);
      }
      j["regulator_count"] = cfg.regulator_count;
      j["capacity_full_scale_watts"] = cfg.capacity_full_scale_watts;
      json gains;
      gains["epsilon"] = cfg.gains.epsilon;
      gains["k_v"] = cfg.gains.k_v;
      gains["k_c"] = cfg.gains.k_c;
      j["gains"] = gains;
      json timeline;
      timeline["duration_seconds"] = cfg.timeline.duration_seconds;
      timeline["step_seconds"] = cfg.timeline.step_seconds;
      timeline["powertalk_period_seconds"] = cfg.timeline.powertalk_period_seconds;
      j["timeline"] = timeline;
      app["secctl"] = j;
    }
    root["application"] = app;
  }

  return root.dump(2) + "\n";
}

}  // namespace powertalk
