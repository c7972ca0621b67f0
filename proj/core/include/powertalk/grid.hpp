#pragma once

#include <string>
#include <utility>
#include <vector>

namespace powertalk {

// Quasi-static electrical model of a low-voltage DC microgrid.
//
// Power electronic converters attach to buses.  A converter in VSC mode runs
// decentralized droop control: it behaves as an ideal voltage source with
// reference x behind a virtual resistance r_d, injecting (x - v)/r_d amps
// into its bus.  A converter in CSC mode injects constant power equal to its
// capacity setting p_max.  Loads are ZIP aggregates per bus, all three terms
// expressed in watts drawn at the rated voltage.

enum class ConverterMode { VSC, CSC };

struct ConverterConstraints {
  double x_min = 0.0;    // volts
  double x_max = 0.0;    // volts
  double r_d_min = 0.0;  // ohms
  double r_d_max = 0.0;  // ohms
};

struct Converter {
  int bus = 0;
  ConverterMode mode = ConverterMode::VSC;
  double reference_voltage = 0.0;   // x, volts (used in VSC mode)
  double virtual_resistance = 0.0;  // r_d, ohms (used in VSC mode)
  double p_max = 0.0;               // capacity, watts
  double incremental_cost = 0.0;    // cost units per watt-hour
  ConverterConstraints constraints;
};

// ZIP load attached to one bus.  Each field is the power the term would draw
// at rated voltage:
//   d_cp: constant power   -> draws d_cp / v amps at bus voltage v
//   d_cc: constant current -> draws d_cc / rated amps regardless of v
//   d_ca: constant admittance (resistance rated^2 / d_ca)
//                          -> draws v * d_ca / rated^2 amps
struct BusLoad {
  double d_cp = 0.0;  // watts
  double d_cc = 0.0;  // watts
  double d_ca = 0.0;  // watts
};

struct Line {
  int bus_a = 0;
  int bus_b = 0;
  double resistance = 0.0;  // ohms
};

struct GridSpec {
  double rated_voltage = 0.0;  // volts
  std::vector<BusLoad> buses;
  std::vector<Line> lines;
  std::vector<Converter> converters;
};

// Solved operating point.  residual_norm is the largest per-bus Kirchhoff
// current residual, normalized by rated_voltage over a 1-ohm base, i.e.
// dimensionless per-unit on the voltage rating.
struct SteadyState {
  std::vector<double> v;       // volts, per bus
  std::vector<double> i_conv;  // amps, per converter (positive = injecting)
  std::vector<double> p_conv;  // watts, per converter
  double residual_norm = 0.0;
};

struct SolveOptions {
  double tolerance_pu = 1e-9;     // convergence tolerance, per-unit on rating
  int max_iterations = 50;
  double collapse_floor_pu = 0.5; // solutions below this fraction of rating
                                  // are rejected as voltage collapse
};

// Closed-form bus voltage for two droop sources (x1, r_d1), (x2, r_d2)
// feeding one resistive load R on a single bus.  Used as an independent
// oracle for the network solver.
double two_vsc_bus_voltage(double load_resistance, double x1, double r_d1,
                           double x2, double r_d2);

// Structural validation of a grid: positive rating, valid bus references,
// positive line resistances, connected bus graph, at least one VSC,
// converter values inside their constraint boxes.  Throws with a message
// naming the offending field; `context` prefixes that path.
void validate_grid(const GridSpec& grid, const std::string& context = "grid");

// Damped Newton solve of the per-bus current balance.  Starts from the flat
// profile v = rated and halves the step while the residual grows.  Throws
// NoSolutionError if the iteration does not converge and
// VoltageCollapseError if it converges below the collapse floor.
SteadyState solve_steady_state(const GridSpec& grid, const SolveOptions& options = {});

// Converter currents/powers implied by a voltage profile.  Pure; does not
// touch the solver.  The state's voltage vector must match the grid.
std::pair<std::vector<double>, std::vector<double>> converter_injections(
    const GridSpec& grid, const SteadyState& state);

}  // namespace powertalk
