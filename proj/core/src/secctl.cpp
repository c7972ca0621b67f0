#include "powertalk/secctl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "powertalk/dispatch.hpp"
#include "powertalk/errors.hpp"

namespace powertalk {

std::vector<std::vector<int>> build_adjacency(const std::vector<DerNode>& nodes,
                                              double comm_radius,
                                              const std::vector<Jammer>& jammers) {
  if (!(comm_radius > 0.0)) {
    throw InvalidParameterError("build_adjacency: comm_radius must be positive");
  }
  for (std::size_t j = 0; j < jammers.size(); ++j) {
    if (!(jammers[j].radius >= 0.0)) {
      throw InvalidParameterError("build_adjacency: jammers[" + std::to_string(j) +
                                  "].radius must be non-negative");
    }
  }
  const int n = static_cast<int>(nodes.size());
  std::vector<char> jammed(n, 0);
  for (int i = 0; i < n; ++i) {
    for (const Jammer& jam : jammers) {
      const double dx = nodes[i].x - jam.x;
      const double dy = nodes[i].y - jam.y;
      if (dx * dx + dy * dy <= jam.radius * jam.radius) {
        jammed[i] = 1;
        break;
      }
    }
  }
  std::vector<std::vector<int>> adjacency(n);
  const double reach_sq = comm_radius * comm_radius;
  for (int i = 0; i < n; ++i) {
    if (jammed[i]) continue;
    for (int j = i + 1; j < n; ++j) {
      if (jammed[j]) continue;
      const double dx = nodes[i].x - nodes[j].x;
      const double dy = nodes[i].y - nodes[j].y;
      if (dx * dx + dy * dy <= reach_sq) {
        adjacency[i].push_back(j);
        adjacency[j].push_back(i);
      }
    }
  }
  return adjacency;
}

bool is_connected(const std::vector<std::vector<int>>& adjacency,
                  const std::vector<int>& subset) {
  const int n = static_cast<int>(adjacency.size());
  std::vector<char> member(n, 0);
  for (int node : subset) {
    if (node < 0 || node >= n) {
      throw InvalidArgumentError("is_connected: node index out of range");
    }
    if (member[node]) {
      throw InvalidArgumentError("is_connected: duplicate node in subset");
    }
    member[node] = 1;
  }
  if (subset.size() <= 1) return true;
  std::vector<int> stack{subset[0]};
  std::vector<char> seen(n, 0);
  seen[subset[0]] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    for (int next : adjacency[node]) {
      if (!member[next] || seen[next]) continue;
      seen[next] = 1;
      ++reached;
      stack.push_back(next);
    }
  }
  return reached == subset.size();
}

std::vector<int> select_regulators(const std::vector<DerNode>& nodes,
                                   const std::vector<std::vector<int>>& adjacency,
                                   int count) {
  const int n = static_cast<int>(nodes.size());
  if (n > 16) {
    throw SizeLimitError("select_regulators: exhaustive search supports at most "
                         "16 nodes, got " +
                         std::to_string(n));
  }
  if (adjacency.size() != nodes.size()) {
    throw InvalidArgumentError("select_regulators: adjacency size mismatch");
  }
  if (count < 1 || count > n) {
    throw InvalidParameterError("select_regulators: count must be in [1, " +
                                std::to_string(n) + "]");
  }
  std::vector<int> eligible;
  for (int i = 0; i < n; ++i) {
    if (!adjacency[i].empty() || n == 1) eligible.push_back(i);
  }
  if (count > static_cast<int>(eligible.size())) return {};

  // Walk combinations in lexicographic order and replace only on strictly
  // higher capacity, so ties keep the lexicographically smallest tuple.
  std::vector<int> pick(count);
  for (int i = 0; i < count; ++i) pick[i] = i;
  std::vector<int> best;
  double best_capacity = -1.0;
  const int m = static_cast<int>(eligible.size());
  while (true) {
    std::vector<int> subset(count);
    double capacity = 0.0;
    for (int i = 0; i < count; ++i) {
      subset[i] = eligible[pick[i]];
      capacity += nodes[subset[i]].capacity_watts;
    }
    if (capacity > best_capacity && is_connected(adjacency, subset)) {
      best_capacity = capacity;
      best = subset;
    }
    int slot = count - 1;
    while (slot >= 0 && pick[slot] == m - count + slot) --slot;
    if (slot < 0) break;
    ++pick[slot];
    for (int i = slot + 1; i < count; ++i) pick[i] = pick[i - 1] + 1;
  }
  return best;
}

namespace {

void check_regulators(const std::vector<int>& regulators, const GridSpec& grid,
                      const char* who) {
  if (regulators.empty()) {
    throw InvalidArgumentError(std::string(who) + ": regulator list must not be empty");
  }
  for (std::size_t i = 0; i < regulators.size(); ++i) {
    const int c = regulators[i];
    if (c < 0 || c >= static_cast<int>(grid.converters.size())) {
      throw InvalidArgumentError(std::string(who) + ": converter index " +
                                 std::to_string(c) + " out of range");
    }
    if (i > 0 && regulators[i - 1] >= c) {
      throw InvalidArgumentError(std::string(who) +
                                 ": regulators must be ascending and distinct");
    }
    if (grid.converters[c].mode != ConverterMode::VSC) {
      throw InvalidModeError(std::string(who) + ": converter " + std::to_string(c) +
                             " must operate as a voltage source to regulate");
    }
    if (!(grid.converters[c].p_max > 0.0)) {
      throw InvalidParameterError(std::string(who) + ": converter " +
                                  std::to_string(c) + " needs positive capacity");
    }
  }
}

}  // namespace

SecondaryState init_secondary(const std::vector<int>& regulator_converters,
                              const GridSpec& grid) {
  check_regulators(regulator_converters, grid, "init_secondary");
  SecondaryState state;
  state.regulators = regulator_converters;
  const SteadyState solved = solve_steady_state(grid);
  for (int c : regulator_converters) {
    state.x_nominal.push_back(grid.converters[c].reference_voltage);
    const double v = solved.v[grid.converters[c].bus];
    state.v_bar.push_back(v);
    state.v_prev.push_back(v);
    state.dx.push_back(0.0);
  }
  return state;
}

SteadyState secondary_step(SecondaryState& state, GridSpec& grid,
                           const std::vector<std::vector<int>>& reg_adjacency,
                           const SecondaryGains& gains) {
  check_regulators(state.regulators, grid, "secondary_step");
  const std::size_t k = state.regulators.size();
  if (reg_adjacency.size() != k) {
    throw InvalidArgumentError("secondary_step: adjacency size mismatch");
  }
  const SteadyState solved = solve_steady_state(grid);

  std::vector<double> v_now(k), i_pu(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Converter& conv = grid.converters[state.regulators[i]];
    v_now[i] = solved.v[conv.bus];
    i_pu[i] = solved.i_conv[state.regulators[i]] / conv.p_max;
  }

  std::vector<double> v_bar_next(k);
  for (std::size_t i = 0; i < k; ++i) {
    double mix = 0.0;
    for (int j : reg_adjacency[i]) mix += state.v_bar[j] - state.v_bar[i];
    v_bar_next[i] = state.v_bar[i] + gains.epsilon * mix + (v_now[i] - state.v_prev[i]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    double share = 0.0;
    for (int j : reg_adjacency[i]) share += i_pu[j] - i_pu[i];
    state.dx[i] += gains.k_v * (grid.rated_voltage - v_bar_next[i]) +
                   gains.k_c * share;
    const Converter& conv = grid.converters[state.regulators[i]];
    const double lo = conv.constraints.x_min - state.x_nominal[i];
    const double hi = conv.constraints.x_max - state.x_nominal[i];
    state.dx[i] = std::clamp(state.dx[i], lo, hi);
    grid.converters[state.regulators[i]].reference_voltage =
        state.x_nominal[i] + state.dx[i];
  }
  state.v_bar = std::move(v_bar_next);
  state.v_prev = std::move(v_now);
  return solved;
}

void release_secondary(const SecondaryState& state, GridSpec& grid) {
  for (std::size_t i = 0; i < state.regulators.size(); ++i) {
    const int c = state.regulators[i];
    if (c < 0 || c >= static_cast<int>(grid.converters.size())) {
      throw InvalidArgumentError("release_secondary: converter index out of range");
    }
    grid.converters[c].reference_voltage = state.x_nominal[i];
  }
}

BitString encode_reconfig_payload(const std::vector<int>& neighbors, int num_nodes,
                                  std::uint32_t capacity_code, int capacity_bits) {
  if (num_nodes < 1) {
    throw InvalidParameterError("encode_reconfig_payload: num_nodes must be >= 1");
  }
  if (capacity_bits < 1 || capacity_bits > 30) {
    throw InvalidParameterError("encode_reconfig_payload: capacity_bits in [1, 30]");
  }
  if (capacity_bits < 31 && capacity_code >= (1u << capacity_bits)) {
    throw InvalidArgumentError("encode_reconfig_payload: capacity code too wide");
  }
  BitString payload(static_cast<std::size_t>(num_nodes) + capacity_bits, 0);
  for (int neighbor : neighbors) {
    if (neighbor < 0 || neighbor >= num_nodes) {
      throw InvalidArgumentError("encode_reconfig_payload: neighbor index out of range");
    }
    payload[neighbor] = 1;
  }
  for (int i = 0; i < capacity_bits; ++i) {
    payload[num_nodes + i] =
        static_cast<std::uint8_t>((capacity_code >> (capacity_bits - 1 - i)) & 1u);
  }
  return payload;
}

ReconfigOutcome run_reconfiguration(const GridSpec& grid, const PowerTalkParams& params,
                                    const std::vector<int>& der_converters,
                                    const std::vector<DerNode>& ders,
                                    const std::vector<std::vector<int>>& adjacency,
                                    int regulator_count, int capacity_bits,
                                    double capacity_full_scale_watts,
                                    const RngKey& rng_key,
                                    const SessionOptions& options) {
  const int n = static_cast<int>(ders.size());
  if (der_converters.size() != ders.size() || adjacency.size() != ders.size()) {
    throw InvalidArgumentError("run_reconfiguration: ders, converters and adjacency "
                               "must describe the same nodes");
  }
  if (n < 1) throw InvalidArgumentError("run_reconfiguration: no nodes");
  if (n > 16) {
    throw SizeLimitError("run_reconfiguration: at most 16 nodes, got " +
                         std::to_string(n));
  }
  if (!params.crc_enabled) {
    throw InvalidParameterError(
        "run_reconfiguration: the exchange must run with CRC enabled");
  }

  std::vector<BitString> payloads;
  payloads.reserve(ders.size());
  for (int i = 0; i < n; ++i) {
    const std::uint32_t code =
        quantize_power(ders[i].capacity_watts, capacity_full_scale_watts, capacity_bits)
            .code;
    payloads.push_back(
        encode_reconfig_payload(adjacency[i], n, code, capacity_bits));
  }

  const SessionReport report =
      run_session(grid, params, der_converters, payloads, {}, rng_key, options);

  ReconfigOutcome outcome;
  outcome.retries = report.retries;
  outcome.aborted = report.aborted;
  outcome.slots_elapsed = report.slots_elapsed;
  outcome.energy_overhead_wh = report.energy_overhead_wh;
  if (report.aborted) {
    outcome.failure_reason = "session_aborted";
    return outcome;
  }
  for (int rx = 0; rx < n; ++rx) {
    for (int tx = 0; tx < n; ++tx) {
      if (report.views[rx][tx].payload != report.views[0][tx].payload) {
        outcome.failure_reason = "views_disagree";
        return outcome;
      }
    }
  }

  // All views agree, so node 0's copy is everyone's copy.  A link only
  // counts when both of its endpoints reported it.
  std::vector<BitString> heard;
  heard.reserve(ders.size());
  for (int tx = 0; tx < n; ++tx) heard.push_back(report.views[0][tx].payload);
  outcome.decoded_adjacency.assign(n, {});
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (heard[i][j] && heard[j][i]) {
        outcome.decoded_adjacency[i].push_back(j);
        outcome.decoded_adjacency[j].push_back(i);
      }
    }
  }
  std::vector<DerNode> decoded_nodes = ders;
  for (int i = 0; i < n; ++i) {
    std::uint32_t code = 0;
    for (int b = 0; b < capacity_bits; ++b) {
      code = (code << 1) | heard[i][n + b];
    }
    decoded_nodes[i].capacity_watts =
        dequantize_power(code, capacity_full_scale_watts, capacity_bits);
  }
  outcome.regulators =
      select_regulators(decoded_nodes, outcome.decoded_adjacency, regulator_count);
  if (outcome.regulators.empty()) {
    outcome.failure_reason = "no_valid_set";
    return outcome;
  }
  outcome.ok = true;
  return outcome;
}

}  // namespace powertalk
