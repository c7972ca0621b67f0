#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "powertalk/mac.hpp"
#include "powertalk/scenario.hpp"

namespace powertalk {

inline constexpr char kToolVersion[] = "0.1.0";

// --- Secondary-control timeline ----------------------------------------------
//
// The jam-demo orchestration: consensus control steps at a fixed cadence,
// interrupted by periodic power-talk phases during which corrections freeze,
// every DER broadcasts its wireless neighbourhood and capacity, and the
// regulator set is re-elected.  Regulators run as voltage sources, the
// remaining DERs inject their full capacity as current sources.  Timed load
// changes and jammer switches apply at the step containing their time.

struct TimelineRow {
  double t_seconds = 0.0;
  int der_id = 0;  // 1-based; DER k operates converter k-1
  ConverterMode mode = ConverterMode::VSC;
  double i_out_amps = 0.0;
  double v_bus_volts = 0.0;
  bool regulator = false;
  bool powertalk_phase = false;
  // What happened at this step: load changes, jammer switches, phase starts
  // and reconfiguration outcomes, ';'-joined.  Shared by the step's rows.
  std::string event;
};

struct TimelineTrace {
  int num_ders = 0;
  // Step-major: one row per DER per time step, DERs in id order.
  std::vector<TimelineRow> rows;
  std::vector<int> final_regulators;  // converter indices, ascending
};

// Runs the scenario's secctl application end to end.  `seed` feeds the
// power-talk sessions; `first_session_observer`, when set, receives every
// data slot of the first reconfiguration session (the per-slot CSV trace).
TimelineTrace run_timeline(
    const Scenario& scenario, std::uint64_t seed,
    const std::function<void(const SlotRecord&)>& first_session_observer = {});

// --- Command runners -----------------------------------------------------------

struct SimOptions {
  std::string out_dir = ".";
  // Overrides the scenario's seed when set (CLI --seed).
  std::optional<std::uint64_t> seed;
  // Also write slot_trace.csv covering the first power-talk session (or, for
  // `ber`, the first amplitude's trials).
  bool trace = false;
};

struct RunArtifacts {
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;  // file names, relative to out_dir, sorted
  double wall_time_seconds = 0.0;
};

std::uint64_t resolve_seed(const Scenario& scenario, const SimOptions& options);

// Each runner writes its result CSVs plus scenario_canonical.json and
// run_manifest.json into options.out_dir.  Identical scenario + seed implies
// byte-identical CSVs; the manifest holds the wall time and is the only
// non-reproducible artifact.  Soft findings go to *warnings when given.
//
//   solve           voltages.csv, converters.csv
//   ber             ber.csv                (needs application.ber)
//   dispatch-sweep  sweep.csv              (needs application.dispatch)
//   jam-demo        trace.csv              (needs application.secctl)
RunArtifacts run_solve(const Scenario& scenario, const SimOptions& options,
                       std::vector<std::string>* warnings = nullptr);
RunArtifacts run_ber(const Scenario& scenario, const SimOptions& options,
                     std::vector<std::string>* warnings = nullptr);
RunArtifacts run_dispatch_sweep_command(const Scenario& scenario,
                                        const SimOptions& options,
                                        std::vector<std::string>* warnings = nullptr);
RunArtifacts run_jam_demo(const Scenario& scenario, const SimOptions& options,
                          std::vector<std::string>* warnings = nullptr);

// Dispatches on the CLI command name.
RunArtifacts run_command(const std::string& command, const Scenario& scenario,
                         const SimOptions& options,
                         std::vector<std::string>* warnings = nullptr);

}  // namespace powertalk
