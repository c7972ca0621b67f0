#include "powertalk/grid.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "powertalk/errors.hpp"

namespace powertalk {

namespace {

// Dense Gaussian elimination with partial pivoting, in place.
// Grids here are tiny (a handful of buses), so no sparse machinery.
std::vector<double> linear_solve(std::vector<std::vector<double>> a,
                                 std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (std::abs(a[pivot][col]) < 1e-300) {
      throw NoSolutionError("network solve: singular Jacobian");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int row = col + 1; row < n; ++row) {
      const double f = a[row][col] / a[col][col];
      if (f == 0.0) continue;
      for (int k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int row = n - 1; row >= 0; --row) {
    double s = b[row];
    for (int k = row + 1; k < n; ++k) s -= a[row][k] * x[k];
    x[row] = s / a[row][row];
  }
  return x;
}

struct Network {
  int n = 0;
  double rated = 0.0;
  // Per bus: attached VSCs / CSCs, line conductances to other buses.
  std::vector<std::vector<int>> vsc_at;
  std::vector<double> csc_power;  // summed constant-power injection
  std::vector<std::vector<std::pair<int, double>>> link;  // (bus, 1/r)
};

Network index_grid(const GridSpec& grid) {
  Network net;
  net.n = static_cast<int>(grid.buses.size());
  net.rated = grid.rated_voltage;
  net.vsc_at.resize(net.n);
  net.csc_power.assign(net.n, 0.0);
  net.link.resize(net.n);
  for (int c = 0; c < static_cast<int>(grid.converters.size()); ++c) {
    const Converter& conv = grid.converters[c];
    if (conv.mode == ConverterMode::VSC) {
      net.vsc_at[conv.bus].push_back(c);
    } else {
      net.csc_power[conv.bus] += conv.p_max;
    }
  }
  for (const Line& line : grid.lines) {
    const double g = 1.0 / line.resistance;
    net.link[line.bus_a].emplace_back(line.bus_b, g);
    net.link[line.bus_b].emplace_back(line.bus_a, g);
  }
  return net;
}

// Current residual at every bus: injections minus withdrawals, amps.
void residual(const GridSpec& grid, const Network& net,
              const std::vector<double>& v, std::vector<double>& f) {
  const double rated = net.rated;
  for (int n = 0; n < net.n; ++n) {
    double fn = 0.0;
    for (int c : net.vsc_at[n]) {
      const Converter& conv = grid.converters[c];
      fn += (conv.reference_voltage - v[n]) / conv.virtual_resistance;
    }
    fn += net.csc_power[n] / v[n];
    for (const auto& [m, g] : net.link[n]) fn -= (v[n] - v[m]) * g;
    const BusLoad& load = grid.buses[n];
    fn -= v[n] * load.d_ca / (rated * rated);
    fn -= load.d_cc / rated;
    fn -= load.d_cp / v[n];
    f[n] = fn;
  }
}

void jacobian(const GridSpec& grid, const Network& net,
              const std::vector<double>& v,
              std::vector<std::vector<double>>& jac) {
  const double rated = net.rated;
  for (auto& row : jac) std::fill(row.begin(), row.end(), 0.0);
  for (int n = 0; n < net.n; ++n) {
    double diag = 0.0;
    for (int c : net.vsc_at[n]) {
      diag -= 1.0 / grid.converters[c].virtual_resistance;
    }
    diag -= net.csc_power[n] / (v[n] * v[n]);
    for (const auto& [m, g] : net.link[n]) {
      diag -= g;
      jac[n][m] += g;
    }
    const BusLoad& load = grid.buses[n];
    diag -= load.d_ca / (rated * rated);
    diag += load.d_cp / (v[n] * v[n]);
    jac[n][n] += diag;
  }
}

double max_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double e : x) m = std::max(m, std::abs(e));
  return m;
}

}  // namespace

double two_vsc_bus_voltage(double load_resistance, double x1, double r_d1,
                           double x2, double r_d2) {
  if (load_resistance <= 0.0 || x1 <= 0.0 || x2 <= 0.0 || r_d1 <= 0.0 || r_d2 <= 0.0) {
    throw InvalidParameterError("two_vsc_bus_voltage: all parameters must be positive");
  }
  const double r = load_resistance;
  return r * (r_d1 * x2 + r_d2 * x1) / (r * (r_d1 + r_d2) + r_d1 * r_d2);
}

void validate_grid(const GridSpec& grid, const std::string& context) {
  auto at = [&](const std::string& path) { return context + "." + path; };
  if (!(grid.rated_voltage > 0.0)) {
    throw InvalidParameterError(at("rated_voltage_volts") + ": must be > 0");
  }
  const int n = static_cast<int>(grid.buses.size());
  if (n == 0) throw InvalidParameterError(at("buses") + ": at least one bus required");

  for (int b = 0; b < n; ++b) {
    const BusLoad& load = grid.buses[b];
    const std::string prefix = at("buses[" + std::to_string(b) + "]");
    if (load.d_cp < 0.0) throw InvalidParameterError(prefix + ".d_cp_watts: must be >= 0");
    if (load.d_cc < 0.0) throw InvalidParameterError(prefix + ".d_cc_watts: must be >= 0");
    if (load.d_ca < 0.0) throw InvalidParameterError(prefix + ".d_ca_watts: must be >= 0");
  }

  for (int l = 0; l < static_cast<int>(grid.lines.size()); ++l) {
    const Line& line = grid.lines[l];
    const std::string prefix = at("lines[" + std::to_string(l) + "]");
    if (line.bus_a < 0 || line.bus_a >= n) {
      throw InvalidParameterError(prefix + ".bus_a: bus index out of range");
    }
    if (line.bus_b < 0 || line.bus_b >= n) {
      throw InvalidParameterError(prefix + ".bus_b: bus index out of range");
    }
    if (line.bus_a == line.bus_b) {
      throw InvalidParameterError(prefix + ": endpoints must differ");
    }
    if (!(line.resistance > 0.0)) {
      throw InvalidParameterError(prefix + ".resistance_ohms: must be > 0");
    }
  }

  bool any_vsc = false;
  for (int c = 0; c < static_cast<int>(grid.converters.size()); ++c) {
    const Converter& conv = grid.converters[c];
    const std::string prefix = at("converters[" + std::to_string(c) + "]");
    if (conv.bus < 0 || conv.bus >= n) {
      throw InvalidParameterError(prefix + ".bus: bus index out of range");
    }
    if (conv.p_max < 0.0) throw InvalidParameterError(prefix + ".p_max_watts: must be >= 0");
    if (!(conv.incremental_cost > 0.0)) {
      throw InvalidParameterError(prefix + ".incremental_cost_per_wh: must be > 0");
    }
    const ConverterConstraints& cc = conv.constraints;
    if (!(cc.x_min > 0.0) || !(cc.x_max > cc.x_min)) {
      throw InvalidParameterError(prefix + ".constraints: need 0 < x_min < x_max");
    }
    if (!(cc.r_d_min > 0.0) || !(cc.r_d_max > cc.r_d_min)) {
      throw InvalidParameterError(prefix + ".constraints: need 0 < r_d_min < r_d_max");
    }
    if (conv.reference_voltage < cc.x_min || conv.reference_voltage > cc.x_max) {
      throw InvalidParameterError(prefix + ".reference_voltage_volts: outside [x_min, x_max]");
    }
    if (conv.virtual_resistance < cc.r_d_min || conv.virtual_resistance > cc.r_d_max) {
      throw InvalidParameterError(prefix + ".virtual_resistance_ohms: outside [r_d_min, r_d_max]");
    }
    if (conv.mode == ConverterMode::VSC) any_vsc = true;
  }
  if (!any_vsc) {
    throw InvalidParameterError(at("converters") + ": at least one converter must be a VSC");
  }

  // Bus graph connectivity (a single bus with no lines is connected).
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  std::vector<std::vector<int>> adj(n);
  for (const Line& line : grid.lines) {
    adj[line.bus_a].push_back(line.bus_b);
    adj[line.bus_b].push_back(line.bus_a);
  }
  while (!frontier.empty()) {
    const int b = frontier.front();
    frontier.pop();
    for (int m : adj[b]) {
      if (!seen[m]) {
        seen[m] = 1;
        ++reached;
        frontier.push(m);
      }
    }
  }
  if (reached != n) {
    throw InvalidParameterError(at("lines") + ": bus graph is not connected");
  }
}

SteadyState solve_steady_state(const GridSpec& grid, const SolveOptions& options) {
  validate_grid(grid);
  const Network net = index_grid(grid);
  const int n = net.n;
  const double rated = net.rated;
  const double v_guard = 0.01 * rated;  // keep 1/v terms finite while iterating

  std::vector<double> v(n, rated);  // flat start selects the high-voltage root
  std::vector<double> f(n), f_trial(n);
  std::vector<std::vector<double>> jac(n, std::vector<double>(n, 0.0));

  residual(grid, net, v, f);
  double fnorm = max_abs(f);
  bool converged = false;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    jacobian(grid, net, v, jac);
    std::vector<double> rhs(n);
    for (int k = 0; k < n; ++k) rhs[k] = -f[k];
    const std::vector<double> step = linear_solve(jac, rhs);

    // Damping: halve the step while it makes the residual worse.
    double alpha = 1.0;
    std::vector<double> v_trial(n);
    double trial_norm = 0.0;
    for (int halving = 0; halving < 40; ++halving) {
      for (int k = 0; k < n; ++k) {
        v_trial[k] = std::max(v[k] + alpha * step[k], v_guard);
      }
      residual(grid, net, v_trial, f_trial);
      trial_norm = max_abs(f_trial);
      if (trial_norm <= fnorm || fnorm == 0.0) break;
      alpha *= 0.5;
    }
    const double step_norm = alpha * max_abs(step);
    v = v_trial;
    f = f_trial;
    fnorm = trial_norm;

    const double res_pu = fnorm / rated;  // per-unit on the rating, 1-ohm base
    if (res_pu <= options.tolerance_pu && step_norm <= options.tolerance_pu * rated) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NoSolutionError("solve_steady_state: Newton iteration did not converge in " +
                          std::to_string(options.max_iterations) + " iterations");
  }

  for (int b = 0; b < n; ++b) {
    if (v[b] < options.collapse_floor_pu * rated) {
      throw VoltageCollapseError("solve_steady_state: bus " + std::to_string(b) +
                                 " settled at " + std::to_string(v[b]) +
                                 " V, below the collapse floor");
    }
  }

  SteadyState state;
  state.v = std::move(v);
  state.residual_norm = fnorm / rated;
  auto [i_conv, p_conv] = converter_injections(grid, state);
  state.i_conv = std::move(i_conv);
  state.p_conv = std::move(p_conv);
  return state;
}

std::pair<std::vector<double>, std::vector<double>> converter_injections(
    const GridSpec& grid, const SteadyState& state) {
  if (state.v.size() != grid.buses.size()) {
    throw InvalidArgumentError("converter_injections: voltage vector size " +
                               std::to_string(state.v.size()) + " does not match bus count " +
                               std::to_string(grid.buses.size()));
  }
  const int m = static_cast<int>(grid.converters.size());
  std::vector<double> i(m), p(m);
  for (int c = 0; c < m; ++c) {
    const Converter& conv = grid.converters[c];
    const double v = state.v[conv.bus];
    if (conv.mode == ConverterMode::VSC) {
      i[c] = (conv.reference_voltage - v) / conv.virtual_resistance;
      p[c] = v * i[c];
    } else {
      p[c] = conv.p_max;
      i[c] = conv.p_max / v;
    }
  }
  return {std::move(i), std::move(p)};
}

}  // namespace powertalk
