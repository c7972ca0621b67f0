#include "powertalk/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "powertalk/dispatch.hpp"
#include "powertalk/errors.hpp"
#include "powertalk/format.hpp"
#include "powertalk/grid.hpp"
#include "powertalk/phy.hpp"
#include "powertalk/rng.hpp"
#include "powertalk/secctl.hpp"

namespace powertalk {

namespace {

const char* mode_name(ConverterMode mode) {
  return mode == ConverterMode::VSC ? "voltage_source" : "current_source";
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void csv_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  out += '\n';
}

// Collects result files in an output directory and closes the run with the
// canonical scenario echo plus a manifest.  Every file is written in binary
// mode with '\n' line ends, so identical content means identical bytes.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(const std::string& out_dir)
      : dir_(out_dir.empty() ? "." : out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) {
      throw IoError("output directory '" + dir_.string() + "': " + ec.message());
    }
  }

  void write(const std::string& name, const std::string& content) {
    const std::filesystem::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
    outputs_.push_back(name);
  }

  RunArtifacts finish(const std::string& command, const Scenario& scenario,
                      std::uint64_t seed) {
    write("scenario_canonical.json", canonical_scenario_json(scenario));
    std::sort(outputs_.begin(), outputs_.end());

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    nlohmann::json manifest;
    manifest["command"] = command;
    manifest["description"] = scenario.description;
    manifest["outputs"] = outputs_;
    manifest["scenario_echo"] = "scenario_canonical.json";
    manifest["seed"] = seed;
    manifest["tool_version"] = kToolVersion;
    manifest["wall_time_seconds"] = wall;
    write("run_manifest.json", manifest.dump(2) + "\n");
    std::sort(outputs_.begin(), outputs_.end());

    RunArtifacts artifacts;
    artifacts.seed = seed;
    artifacts.outputs = std::move(outputs_);
    artifacts.wall_time_seconds = wall;
    return artifacts;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void warn(std::vector<std::string>* warnings, const std::string& message) {
  if (warnings) warnings->push_back(message);
}

void warn_events_ignored(std::vector<std::string>* warnings,
                         const Scenario& scenario, const std::string& command) {
  if (!scenario.events.empty()) {
    warn(warnings, "scenario.events: the '" + command +
                       "' command uses the initial grid and ignores timed events");
  }
}

constexpr char kSlotTraceHeader[] =
    "slot,transmitter,bit,receiver,true_voltage_volts,observation_volts,decision\n";

// One trace line per listening unit of a data slot; the transmitter itself is
// half-duplex and contributes no observation.
void append_slot_rows(std::string& csv, const SlotRecord& record,
                      const std::vector<int>& units) {
  for (std::size_t u = 0; u < record.observations.size(); ++u) {
    if (static_cast<int>(u) == record.transmitter) continue;
    const int receiver_bus = record.grid->converters[units[u]].bus;
    csv_row(csv, {std::to_string(record.slot),
                  std::to_string(units[record.transmitter]),
                  std::to_string(record.bit), std::to_string(units[u]),
                  format_double(record.state->v[receiver_bus]),
                  format_double(record.observations[u]),
                  std::to_string(record.decisions[u])});
  }
}

// --- Timeline internals -------------------------------------------------------

struct JamDirective {
  double t = 0.0;
  bool on = false;
};

// Per jammer, the time-ordered on/off switch list: the optional activation
// time plus any jammer_on / jammer_off events.  The latest directive at or
// before t wins; with none, the jammer is off.
std::vector<std::vector<JamDirective>> jam_directives(const Scenario& scenario) {
  const SecCtlAppConfig& cfg = *scenario.secctl;
  std::vector<std::vector<JamDirective>> out(cfg.jammers.size());
  for (std::size_t j = 0; j < cfg.jammers.size(); ++j) {
    if (cfg.jammers[j].active_from_seconds) {
      out[j].push_back({*cfg.jammers[j].active_from_seconds, true});
    }
  }
  for (const ScenarioEvent& event : scenario.events) {
    if (event.kind == ScenarioEvent::Kind::LoadChange) continue;
    out[event.jammer_index].push_back(
        {event.time_seconds, event.kind == ScenarioEvent::Kind::JammerOn});
  }
  for (std::vector<JamDirective>& list : out) {
    std::stable_sort(list.begin(), list.end(),
                     [](const JamDirective& a, const JamDirective& b) {
                       return a.t < b.t;
                     });
  }
  return out;
}

std::vector<bool> jammers_active_at(
    const std::vector<std::vector<JamDirective>>& directives, double t) {
  std::vector<bool> active(directives.size(), false);
  for (std::size_t j = 0; j < directives.size(); ++j) {
    for (const JamDirective& d : directives[j]) {
      if (d.t > t + 1e-9) break;
      active[j] = d.on;
    }
  }
  return active;
}

std::vector<Jammer> active_jammers(const SecCtlAppConfig& cfg,
                                   const std::vector<bool>& active) {
  std::vector<Jammer> out;
  for (std::size_t j = 0; j < active.size(); ++j) {
    if (active[j]) out.push_back(cfg.jammers[j].jammer);
  }
  return out;
}

// Restriction of the DER adjacency to the regulator set, re-indexed to
// regulator slots (what secondary_step expects).
std::vector<std::vector<int>> regulator_subgraph(
    const std::vector<std::vector<int>>& adjacency,
    const std::vector<int>& regulators) {
  std::vector<int> slot(adjacency.size(), -1);
  for (std::size_t i = 0; i < regulators.size(); ++i) slot[regulators[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> out(regulators.size());
  for (std::size_t i = 0; i < regulators.size(); ++i) {
    for (int neighbor : adjacency[regulators[i]]) {
      if (slot[neighbor] >= 0) out[i].push_back(slot[neighbor]);
    }
  }
  return out;
}

std::string der_list(const std::vector<int>& converters) {
  std::string out;
  for (int c : converters) {
    if (!out.empty()) out += ' ';
    out += std::to_string(c + 1);
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (const std::string& part : parts) {
    if (!out.empty()) out += sep;
    out += part;
  }
  return out;
}

}  // namespace

std::uint64_t resolve_seed(const Scenario& scenario, const SimOptions& options) {
  return options.seed ? *options.seed : scenario.seed;
}

TimelineTrace run_timeline(
    const Scenario& scenario, std::uint64_t seed,
    const std::function<void(const SlotRecord&)>& first_session_observer) {
  if (!scenario.secctl) {
    throw InvalidParameterError(
        "scenario: run_timeline needs an application.secctl section");
  }
  const SecCtlAppConfig& cfg = *scenario.secctl;
  const PowerTalkParams& params = scenario.powertalk;
  const int n = static_cast<int>(scenario.grid.converters.size());
  GridSpec grid = scenario.grid;
  const RngKey key{seed, ""};

  std::vector<int> all_ders(n);
  std::iota(all_ders.begin(), all_ders.end(), 0);

  const std::vector<std::vector<JamDirective>> directives = jam_directives(scenario);
  std::vector<bool> jam_state(cfg.jammers.size(), false);

  TimelineTrace trace;
  trace.num_ders = n;

  std::vector<int> regulators;
  std::optional<SecondaryState> control;
  std::vector<std::string> annotations;

  auto wireless = [&]() {
    return build_adjacency(cfg.positions, cfg.comm_range_meters,
                           active_jammers(cfg, jam_state));
  };

  // Re-seats the regulator set: old corrections are released, regulators run
  // as voltage sources, everyone else injects full capacity as a current
  // source, and consensus state restarts from the fresh operating point.
  auto install = [&](const std::vector<int>& selected) {
    if (control) {
      release_secondary(*control, grid);
      control.reset();
    }
    regulators = selected;
    if (regulators.empty()) return;
    std::vector<bool> is_reg(n, false);
    for (int r : regulators) is_reg[r] = true;
    for (int c = 0; c < n; ++c) {
      grid.converters[c].mode = is_reg[c] ? ConverterMode::VSC : ConverterMode::CSC;
    }
    control = init_secondary(regulators, grid);
  };

  auto emit = [&](double t, const SteadyState& state, bool powertalk) {
    std::vector<bool> is_reg(n, false);
    for (int r : regulators) is_reg[r] = true;
    const std::string event_text = join(annotations, ';');
    annotations.clear();
    for (int c = 0; c < n; ++c) {
      TimelineRow row;
      row.t_seconds = t;
      row.der_id = c + 1;
      row.mode = powertalk ? ConverterMode::VSC : grid.converters[c].mode;
      row.i_out_amps = state.i_conv[c];
      row.v_bus_volts = state.v[grid.converters[c].bus];
      row.regulator = is_reg[c];
      row.powertalk_phase = powertalk;
      row.event = event_text;
      trace.rows.push_back(std::move(row));
    }
  };

  // Bootstrap: before the first power-talk phase the DERs have not exchanged
  // anything yet, so the initial set comes from the true wireless state and
  // true capacities (perfect-knowledge start).
  jam_state = jammers_active_at(directives, 0.0);
  {
    const std::vector<int> selected =
        select_regulators(cfg.positions, wireless(), cfg.regulator_count);
    if (selected.empty()) {
      annotations.push_back("bootstrap_failed no_valid_set");
    } else {
      install(selected);
      annotations.push_back("bootstrap " + der_list(selected));
    }
  }

  double session_start = 0.0;
  double session_end = -1.0;
  std::vector<SteadyState> session_states;
  std::optional<ReconfigOutcome> pending;
  bool first_session = true;
  std::size_t next_phase = 1;
  std::size_t next_event = 0;

  const double dt = cfg.timeline.step_seconds;
  const double period = cfg.timeline.powertalk_period_seconds;
  const long num_steps =
      static_cast<long>(std::floor(cfg.timeline.duration_seconds / dt + 1e-9)) + 1;

  for (long k = 0; k < num_steps; ++k) {
    const double t = k * dt;

    while (next_event < scenario.events.size() &&
           scenario.events[next_event].time_seconds <= t + 1e-9) {
      const ScenarioEvent& event = scenario.events[next_event];
      if (event.kind == ScenarioEvent::Kind::LoadChange) {
        grid.buses[event.bus] = event.new_load;
        annotations.push_back("load_change bus=" + std::to_string(event.bus));
      }
      ++next_event;
    }
    const std::vector<bool> now = jammers_active_at(directives, t);
    for (std::size_t j = 0; j < now.size(); ++j) {
      if (now[j] != jam_state[j]) {
        annotations.push_back((now[j] ? "jammer_on " : "jammer_off ") +
                              std::to_string(j));
      }
    }
    jam_state = now;

    // Mid-phase: show the recorded slot states; corrections stay frozen.
    if (session_end > 0.0 && t < session_end - 1e-9) {
      const long idx = std::clamp<long>(
          static_cast<long>((t - session_start) / params.slot_duration + 1e-9), 0,
          static_cast<long>(session_states.size()) - 1);
      emit(t, session_states[idx], true);
      continue;
    }

    // A phase that just ended applies its outcome now.
    if (pending) {
      const ReconfigOutcome outcome = *pending;
      pending.reset();
      if (!outcome.ok) {
        annotations.push_back("reconfig_failed " + outcome.failure_reason);
      } else if (outcome.regulators == regulators) {
        annotations.push_back("regulators_kept");
      } else {
        install(outcome.regulators);
        annotations.push_back("reselect " + der_list(outcome.regulators));
      }
    }

    // Open the next power-talk phase when its time arrives.
    if (next_phase * period <= t + 1e-9 &&
        next_phase * period <= cfg.timeline.duration_seconds + 1e-9) {
      session_start = t;

      // Pre-fill the per-slot record with the session's quiet operating
      // point (all DERs as voltage sources); data slots overwrite it.
      GridSpec session_grid = grid;
      for (Converter& conv : session_grid.converters) {
        conv.mode = ConverterMode::VSC;
      }
      const SteadyState quiet = solve_steady_state(session_grid);

      std::map<long, SteadyState> observed;
      const bool watch = first_session && static_cast<bool>(first_session_observer);
      SessionOptions session_options;
      session_options.slot_observer = [&](const SlotRecord& record) {
        observed[record.slot] = *record.state;
        if (watch) first_session_observer(record);
      };

      ReconfigOutcome outcome = run_reconfiguration(
          grid, params, all_ders, cfg.positions, wireless(), cfg.regulator_count,
          params.bits_per_payload, cfg.capacity_full_scale_watts,
          key.child("reconfig/t:" + format_double(t)), session_options);
      first_session = false;

      session_states.assign(static_cast<std::size_t>(outcome.slots_elapsed), quiet);
      for (const auto& [slot, state] : observed) {
        if (slot >= 0 && slot < outcome.slots_elapsed) {
          session_states[static_cast<std::size_t>(slot)] = state;
        }
      }
      session_end = t + static_cast<double>(outcome.slots_elapsed) * params.slot_duration;
      pending = std::move(outcome);

      annotations.push_back("powertalk_start");
      emit(t, session_states.empty() ? quiet : session_states.front(), true);
      // Phase times the session ran over are skipped, not queued.
      while (next_phase * period <= session_end + 1e-9) ++next_phase;
      continue;
    }

    if (control) {
      const SteadyState solved =
          secondary_step(*control, grid, regulator_subgraph(wireless(), regulators),
                         cfg.gains);
      emit(t, solved, false);
    } else {
      emit(t, solve_steady_state(grid), false);
    }
  }

  trace.final_regulators = regulators;
  return trace;
}

RunArtifacts run_solve(const Scenario& scenario, const SimOptions& options,
                       std::vector<std::string>* warnings) {
  ArtifactWriter artifacts(options.out_dir);
  const std::uint64_t seed = resolve_seed(scenario, options);
  warn_events_ignored(warnings, scenario, "solve");
  if (options.trace) {
    warn(warnings, "--trace: the 'solve' command runs no power-talk session");
  }

  const SteadyState state = solve_steady_state(scenario.grid);

  std::string voltages = "bus,voltage_volts\n";
  for (std::size_t b = 0; b < state.v.size(); ++b) {
    csv_row(voltages, {std::to_string(b), format_double(state.v[b])});
  }
  artifacts.write("voltages.csv", voltages);

  std::string converters = "converter,bus,mode,current_amps,power_watts\n";
  for (std::size_t c = 0; c < scenario.grid.converters.size(); ++c) {
    const Converter& conv = scenario.grid.converters[c];
    csv_row(converters,
            {std::to_string(c), std::to_string(conv.bus), mode_name(conv.mode),
             format_double(state.i_conv[c]), format_double(state.p_conv[c])});
  }
  artifacts.write("converters.csv", converters);

  return artifacts.finish("solve", scenario, seed);
}

RunArtifacts run_ber(const Scenario& scenario, const SimOptions& options,
                     std::vector<std::string>* warnings) {
  if (!scenario.ber) {
    throw InvalidParameterError(
        "scenario: the 'ber' command needs an application.ber section");
  }
  ArtifactWriter artifacts(options.out_dir);
  const std::uint64_t seed = resolve_seed(scenario, options);
  warn_events_ignored(warnings, scenario, "ber");

  const BerConfig& cfg = *scenario.ber;
  const GridSpec& grid = scenario.grid;
  const RngKey key{seed, ""};
  const int rx_bus = grid.converters[cfg.receiver].bus;

  // Receivers compare against the exact quiet-point voltage, so the
  // empirical figure estimates precisely what analytic_ber predicts.
  const SteadyState quiet = solve_steady_state(grid);
  const double baseline = quiet.v[rx_bus];

  std::string csv = "gamma_volts,analytic_ber,empirical_ber,bit_errors,num_bits\n";
  std::string slot_csv = kSlotTraceHeader;
  bool first_gamma = true;
  bool traced = false;

  for (double gamma : cfg.gamma_values) {
    PowerTalkParams params = scenario.powertalk;
    params.gamma = gamma;

    const SteadyState mark =
        solve_steady_state(apply_symbol(grid, cfg.transmitter, 1, params));
    const SteadyState space =
        solve_steady_state(apply_symbol(grid, cfg.transmitter, 0, params));
    const double v_mark = mark.v[rx_bus];
    const double v_space = space.v[rx_bus];
    const double analytic = 0.5 * (analytic_ber(v_mark - baseline, params) +
                                   analytic_ber(baseline - v_space, params));

    Rng rng = key.stream("ber/gamma:" + format_double(gamma));
    long errors = 0;
    for (int trial = 0; trial < cfg.num_bits; ++trial) {
      const int bit = static_cast<int>(rng.below(2));
      const double true_v = bit ? v_mark : v_space;
      const SlotObservation obs = observe_slot(true_v, params, rng, rx_bus, trial);
      const int decision = detect_bit(obs, baseline);
      if (decision != bit) ++errors;
      if (options.trace && first_gamma) {
        csv_row(slot_csv,
                {std::to_string(trial), std::to_string(cfg.transmitter),
                 std::to_string(bit), std::to_string(cfg.receiver),
                 format_double(true_v), format_double(obs.averaged_voltage),
                 std::to_string(decision)});
        traced = true;
      }
    }
    first_gamma = false;

    csv_row(csv, {format_double(gamma), format_double(analytic),
                  format_double(static_cast<double>(errors) / cfg.num_bits),
                  std::to_string(errors), std::to_string(cfg.num_bits)});
  }

  artifacts.write("ber.csv", csv);
  if (traced) artifacts.write("slot_trace.csv", slot_csv);
  return artifacts.finish("ber", scenario, seed);
}

namespace {

// Replays the sweep's first priced session (first Q, first gamma, first run
// with a positive ideal cost) with an observer attached.  The label-keyed
// substreams guarantee the replay draws exactly what the sweep drew.
bool replay_first_sweep_session(const SweepConfig& config,
                                const std::function<void(const SlotRecord&)>& observer) {
  const int num_units = static_cast<int>(config.grid.converters.size());
  GridSpec grid = config.grid;
  for (Converter& conv : grid.converters) conv.mode = ConverterMode::VSC;
  std::vector<DispatchUnit> units(num_units);
  for (int u = 0; u < num_units; ++u) {
    units[u].incremental_cost = grid.converters[u].incremental_cost;
  }

  const RngKey key{config.seed, ""};
  const int bits = config.bits_values.front();
  const double gamma = config.gamma_values.front();
  PowerTalkParams params = config.params;
  params.gamma = gamma;
  params.bits_per_payload = bits;
  const std::string cell_label =
      "noise/bits:" + std::to_string(bits) + "/gamma:" + format_double(gamma);
  const double period_hours = config.period_seconds / 3600.0;

  for (int run = 0; run < config.num_runs; ++run) {
    Rng draw = key.stream("capacity/run:" + std::to_string(run));
    std::vector<double> caps(num_units);
    for (int u = 0; u < num_units; ++u) {
      caps[u] = draw.uniform(0.0, config.p_cap_watts);
      units[u].capacity_watts = caps[u];
      grid.converters[u].p_max = caps[u];
    }
    const double ideal_cost =
        dispatch_cost_rate(merit_order(config.demand_watts, units),
                           config.penalty_cost_per_wh) *
        period_hours;
    if (!(ideal_cost > 0.0)) continue;

    std::vector<BitString> payloads(num_units);
    for (int u = 0; u < num_units; ++u) {
      payloads[u] = code_to_bits(
          quantize_power(caps[u], config.p_cap_watts, bits).code, bits);
    }
    SessionOptions session_options;
    session_options.slot_observer = observer;
    run_session(grid, params, payloads, {},
                key.child(cell_label + "/run:" + std::to_string(run)),
                session_options);
    return true;
  }
  return false;
}

}  // namespace

RunArtifacts run_dispatch_sweep_command(const Scenario& scenario,
                                        const SimOptions& options,
                                        std::vector<std::string>* warnings) {
  if (!scenario.dispatch) {
    throw InvalidParameterError(
        "scenario: the 'dispatch-sweep' command needs an application.dispatch "
        "section");
  }
  ArtifactWriter artifacts(options.out_dir);
  const std::uint64_t seed = resolve_seed(scenario, options);
  warn_events_ignored(warnings, scenario, "dispatch-sweep");

  const DispatchAppConfig& app = *scenario.dispatch;
  SweepConfig cfg;
  cfg.grid = scenario.grid;
  cfg.params = scenario.powertalk;
  cfg.bits_values = app.q_values;
  cfg.gamma_values = app.gamma_values;
  cfg.num_runs = app.monte_carlo_runs;
  cfg.demand_watts = app.demand_watts;
  cfg.p_cap_watts = app.p_cap_watts;
  cfg.penalty_cost_per_wh = app.penalty_cost_per_wh;
  cfg.period_seconds = app.period_duration_seconds;
  cfg.price_overhead = app.price_overhead;
  cfg.seed = seed;

  const std::vector<SweepCell> cells = run_dispatch_sweep(cfg, warnings);

  std::string csv = "Q,gamma_volts,delta_mean,delta_stderr,ber_estimate,overhead_wh_mean\n";
  for (const SweepCell& cell : cells) {
    csv_row(csv, {std::to_string(cell.bits), format_double(cell.gamma_volts),
                  format_double(cell.delta_mean), format_double(cell.delta_stderr),
                  format_double(cell.ber_estimate),
                  format_double(cell.overhead_wh_mean)});
  }
  artifacts.write("sweep.csv", csv);

  if (options.trace) {
    std::string slot_csv = kSlotTraceHeader;
    std::vector<int> units(cfg.grid.converters.size());
    std::iota(units.begin(), units.end(), 0);
    const bool traced = replay_first_sweep_session(
        cfg, [&](const SlotRecord& record) { append_slot_rows(slot_csv, record, units); });
    if (traced) {
      artifacts.write("slot_trace.csv", slot_csv);
    } else {
      warn(warnings, "--trace: every run of the first cell was skipped");
    }
  }

  return artifacts.finish("dispatch-sweep", scenario, seed);
}

RunArtifacts run_jam_demo(const Scenario& scenario, const SimOptions& options,
                          std::vector<std::string>* warnings) {
  if (!scenario.secctl) {
    throw InvalidParameterError(
        "scenario: the 'jam-demo' command needs an application.secctl section");
  }
  ArtifactWriter artifacts(options.out_dir);
  const std::uint64_t seed = resolve_seed(scenario, options);

  std::string slot_csv = kSlotTraceHeader;
  bool traced = false;
  std::function<void(const SlotRecord&)> observer;
  if (options.trace) {
    std::vector<int> units(scenario.grid.converters.size());
    std::iota(units.begin(), units.end(), 0);
    observer = [&slot_csv, &traced, units](const SlotRecord& record) {
      append_slot_rows(slot_csv, record, units);
      traced = true;
    };
  }

  const TimelineTrace timeline = run_timeline(scenario, seed, observer);

  std::string csv =
      "t_seconds,der_id,mode,i_out_amps,v_bus_volts,regulator_flag,phase,event\n";
  for (const TimelineRow& row : timeline.rows) {
    csv_row(csv, {format_double(row.t_seconds), std::to_string(row.der_id),
                  mode_name(row.mode), format_double(row.i_out_amps),
                  format_double(row.v_bus_volts), row.regulator ? "1" : "0",
                  row.powertalk_phase ? "powertalk" : "secondary", row.event});
  }
  artifacts.write("trace.csv", csv);

  if (options.trace) {
    if (traced) {
      artifacts.write("slot_trace.csv", slot_csv);
    } else {
      warn(warnings, "--trace: no power-talk session ran within the timeline");
    }
  }

  return artifacts.finish("jam-demo", scenario, seed);
}

RunArtifacts run_command(const std::string& command, const Scenario& scenario,
                         const SimOptions& options,
                         std::vector<std::string>* warnings) {
  if (command == "solve") return run_solve(scenario, options, warnings);
  if (command == "ber") return run_ber(scenario, options, warnings);
  if (command == "dispatch-sweep") {
    return run_dispatch_sweep_command(scenario, options, warnings);
  }
  if (command == "jam-demo") return run_jam_demo(scenario, options, warnings);
  throw InvalidArgumentError("unknown command '" + command + "'");
}

}  // namespace powertalk
