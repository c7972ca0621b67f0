#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "powertalk/errors.hpp"
#include "powertalk/scenario.hpp"
#include "powertalk/sim.hpp"

using namespace powertalk;
namespace fs = std::filesystem;

namespace {

std::string scenario_path(const std::string& name) {
  return std::string(POWERTALK_SCENARIO_DIR) + "/" + name;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Fresh scratch directory per call; cleaned up by the fixture's destructor.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("powertalk_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// A small three-DER scenario for timeline tests: triangle wireless graph,
// two regulators, short horizon.
Scenario mini_timeline_scenario() {
  const std::string text = R"({
    "seed": 11,
    "grid": {
      "rated_voltage_volts": 48.0,
      "buses": [{"d_cp_watts": 500.0, "d_cc_watts": 0.0, "d_ca_watts": 0.0}],
      "lines": [],
      "converters": [
        {"bus": 0, "mode": "voltage_source", "reference_voltage_volts": 48.0,
         "virtual_resistance_ohms": 0.2, "p_max_watts": 400.0,
         "incremental_cost_per_wh": 1.0,
         "constraints": {"x_min_volts": 44.0, "x_max_volts": 52.0,
                          "r_d_min_ohms": 0.05, "r_d_max_ohms": 0.5}},
        {"bus": 0, "mode": "voltage_source", "reference_voltage_volts": 48.0,
         "virtual_resistance_ohms": 0.2, "p_max_watts": 500.0,
         "incremental_cost_per_wh": 1.0,
         "constraints": {"x_min_volts": 44.0, "x_max_volts": 52.0,
                          "r_d_min_ohms": 0.05, "r_d_max_ohms": 0.5}},
        {"bus": 0, "mode": "voltage_source", "reference_voltage_volts": 48.0,
         "virtual_resistance_ohms": 0.2, "p_max_watts": 300.0,
         "incremental_cost_per_wh": 1.0,
         "constraints": {"x_min_volts": 44.0, "x_max_volts": 52.0,
                          "r_d_min_ohms": 0.05, "r_d_max_ohms": 0.5}}
      ]
    },
    "powertalk": {
      "gamma_volts": 0.25, "slot_duration_seconds": 0.0025,
      "sampling_frequency_hz": 40000.0, "noise_sigma_volts": 0.0,
      "bits_per_payload": 8, "crc_enabled": true,
      "modulation": "reference_voltage"
    },
    "application": {
      "secctl": {
        "comm_range_meters": 15.0,
        "positions": [
          {"x_meters": 0.0, "y_meters": 0.0},
          {"x_meters": 10.0, "y_meters": 0.0},
          {"x_meters": 5.0, "y_meters": 8.0}
        ],
        "jammers": [],
        "regulator_count": 2,
        "capacity_full_scale_watts": 1024.0,
        "gains": {"epsilon": 0.3, "k_v": 0.05, "k_c": 0.4},
        "timeline": {"duration_seconds": 2.0, "step_seconds": 0.01,
                      "powertalk_period_seconds": 10.0}
      }
    }
  })";
  return parse_scenario(text);
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("the seed override takes precedence over the scenario") {
  const Scenario s = load_scenario_file(scenario_path("eq1.json"));
  SimOptions opts;
  CHECK(resolve_seed(s, opts) == 1);
  opts.seed = 99;
  CHECK(resolve_seed(s, opts) == 99);
}

TEST_CASE("solve writes its artifacts and reports them sorted") {
  const Scenario s = load_scenario_file(scenario_path("eq1.json"));
  TempDir dir("solve");
  SimOptions opts;
  opts.out_dir = dir.path.string();
  const RunArtifacts a = run_solve(s, opts);
  CHECK(a.seed == 1);
  CHECK(a.wall_time_seconds >= 0.0);
  const std::vector<std::string> want = {"converters.csv", "run_manifest.json",
                                         "scenario_canonical.json", "voltages.csv"};
  CHECK(a.outputs == want);
  for (const std::string& name : a.outputs) CHECK(fs::exists(dir.path / name));

  // The voltage answer for this grid has a closed form: 57.72 / 1.22.
  const std::string voltages = read_file(dir.path / "voltages.csv");
  CHECK(voltages.find("47.3114754098") != std::string::npos);
  // The canonical echo matches the shipped file byte for byte.
  CHECK(read_file(dir.path / "scenario_canonical.json") ==
        read_file(scenario_path("eq1.json")));
}

TEST_CASE("repeat runs produce byte-identical csv outputs") {
  const Scenario s = load_scenario_file(scenario_path("ber.json"));
  TempDir dir_a("ber_a");
  TempDir dir_b("ber_b");
  SimOptions opts;
  opts.out_dir = dir_a.path.string();
  const RunArtifacts a = run_ber(s, opts);
  opts.out_dir = dir_b.path.string();
  const RunArtifacts b = run_ber(s, opts);
  CHECK(a.outputs == b.outputs);
  for (const std::string& name : a.outputs) {
    if (name == "run_manifest.json") continue;  // carries wall time
    CHECK(read_file(dir_a.path / name) == read_file(dir_b.path / name));
  }
}

TEST_CASE("ber output grows one row per amplitude and stays in [0, 1]") {
  const Scenario s = load_scenario_file(scenario_path("ber.json"));
  TempDir dir("ber_rows");
  SimOptions opts;
  opts.out_dir = dir.path.string();
  run_ber(s, opts);
  std::ifstream in(dir.path / "ber.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "gamma_volts,analytic_ber,empirical_ber,bit_errors,num_bits");
  int rows = 0;
  std::string line;
  double last_analytic = 1.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    std::istringstream fields(line);
    std::string gamma, analytic, empirical;
    std::getline(fields, gamma, ',');
    std::getline(fields, analytic, ',');
    std::getline(fields, empirical, ',');
    const double a = std::stod(analytic);
    const double e = std::stod(empirical);
    CHECK(a >= 0.0);
    CHECK(a <= 0.5);
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
    CHECK(a <= last_analytic + 1e-15);  // stronger signal, fewer errors
    last_analytic = a;
  }
  CHECK(rows == 5);
}

TEST_CASE("command dispatch rejects unknown commands and wrong sections") {
  const Scenario s = load_scenario_file(scenario_path("eq1.json"));
  TempDir dir("cmd");
  SimOptions opts;
  opts.out_dir = dir.path.string();
  CHECK_THROWS_AS(run_command("frobnicate", s, opts), InvalidArgumentError);
  // eq1 has no application sections at all.
  CHECK_THROWS_AS(run_command("ber", s, opts), InvalidParameterError);
  CHECK_THROWS_AS(run_command("dispatch-sweep", s, opts), InvalidParameterError);
  CHECK_THROWS_AS(run_command("jam-demo", s, opts), InvalidParameterError);
  // But solve works on any valid scenario.
  const RunArtifacts a = run_command("solve", s, opts);
  CHECK(a.outputs.size() == 4);
}

TEST_CASE("a short timeline bootstraps, steps, and reconfigures on schedule") {
  const Scenario s = mini_timeline_scenario();
  const TimelineTrace trace = run_timeline(s, 11);

  CHECK(trace.num_ders == 3);
  REQUIRE_FALSE(trace.rows.empty());
  CHECK(trace.rows.size() % 3 == 0);

  // On the triangle every pair connects; {0, 1} = 900 W has the most capacity.
  CHECK(trace.final_regulators == std::vector<int>{0, 1});

  // Row 0 carries the bootstrap annotation with 1-based DER ids.
  CHECK(trace.rows[0].t_seconds == 0.0);
  CHECK(trace.rows[0].event.find("bootstrap 1 2") != std::string::npos);

  // Step-major layout: three consecutive rows share a timestamp.
  CHECK(trace.rows[0].der_id == 1);
  CHECK(trace.rows[1].der_id == 2);
  CHECK(trace.rows[2].der_id == 3);
  CHECK(trace.rows[1].t_seconds == trace.rows[0].t_seconds);

  // Non-regulators run as current sources.
  int csc_rows = 0;
  int vsc_rows = 0;
  for (const TimelineRow& row : trace.rows) {
    if (row.mode == ConverterMode::CSC) {
      ++csc_rows;
      CHECK_FALSE(row.regulator);
      CHECK(row.der_id == 3);
    } else {
      ++vsc_rows;
    }
  }
  CHECK(csc_rows > 0);
  CHECK(csc_rows * 2 == vsc_rows);

  // Period 10 s exceeds the 2 s horizon: no reselection phase ever fires.
  for (const TimelineRow& row : trace.rows) {
    CHECK(row.event.find("reselect") == std::string::npos);
    CHECK_FALSE(row.powertalk_phase);
  }

  // The consensus controller pulls the bus back to rating by the end.
  const TimelineRow& last = trace.rows.back();
  CHECK(last.t_seconds == doctest::Approx(2.0));
  CHECK(last.v_bus_volts == doctest::Approx(48.0).epsilon(1e-3));
}

TEST_CASE("timelines and their artifacts reproduce bit for bit") {
  const Scenario s = load_scenario_file(scenario_path("fig6.json"));
  TempDir dir_a("jam_a");
  TempDir dir_b("jam_b");
  SimOptions opts;
  opts.out_dir = dir_a.path.string();
  const RunArtifacts a = run_jam_demo(s, opts);
  opts.out_dir = dir_b.path.string();
  const RunArtifacts b = run_jam_demo(s, opts);
  CHECK(a.outputs == b.outputs);
  for (const std::string& name : a.outputs) {
    if (name == "run_manifest.json") continue;
    CHECK(read_file(dir_a.path / name) == read_file(dir_b.path / name));
  }
  const std::string trace_csv = read_file(dir_a.path / "trace.csv");
  CHECK(trace_csv.find("bootstrap 2 5 6 9") != std::string::npos);
  CHECK(trace_csv.find("reselect 1 2 7 10") != std::string::npos);
}

TEST_CASE("the slot trace option writes one extra artifact") {
  const Scenario s = load_scenario_file(scenario_path("eq1.json"));
  TempDir dir("trace");
  SimOptions opts;
  opts.out_dir = dir.path.string();
  opts.trace = true;
  // solve has no sessions, so no slot trace applies there; ber writes one.
  const Scenario b = load_scenario_file(scenario_path("ber.json"));
  const RunArtifacts a = run_ber(b, opts);
  CHECK(std::find(a.outputs.begin(), a.outputs.end(), "slot_trace.csv") != a.outputs.end());
  CHECK(fs::exists(dir.path / "slot_trace.csv"));
}

}  // TEST_SUITE
