#pragma once

#include <string>
#include <vector>

#include "powertalk/grid.hpp"
#include "powertalk/mac.hpp"
#include "powertalk/phy.hpp"
#include "powertalk/rng.hpp"

namespace powertalk {

// --- Wireless control-plane topology ----------------------------------------

struct DerNode {
  double x = 0.0;  // position, meters
  double y = 0.0;
  double capacity_watts = 0.0;
};

struct Jammer {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;  // nodes within this distance lose all links
};

// Unit-disk adjacency: an undirected link joins two nodes iff they are within
// `comm_radius` of each other and neither sits inside any jammer's radius.
// Returned as sorted neighbor lists, no self loops.  Distances compare as
// squared values, so integer-coordinate layouts behave exactly.
std::vector<std::vector<int>> build_adjacency(const std::vector<DerNode>& nodes,
                                              double comm_radius,
                                              const std::vector<Jammer>& jammers = {});

// True iff `subset` induces a connected subgraph.  Empty and singleton
// subsets count as connected.
bool is_connected(const std::vector<std::vector<int>>& adjacency,
                  const std::vector<int>& subset);

// Picks `count` nodes forming a connected subgraph with maximum total
// capacity; ties go to the lexicographically smallest sorted index tuple.
// Isolated nodes are not eligible (unless the graph has a single node).
// Returns an empty vector when no connected subset of that size exists.
// Exhaustive search; more than 16 nodes raises SizeLimitError.
std::vector<int> select_regulators(const std::vector<DerNode>& nodes,
                                   const std::vector<std::vector<int>>& adjacency,
                                   int count);

// --- Consensus-based secondary control --------------------------------------
//
// The selected regulators cooperatively remove the droop voltage offset and
// equalize per-unit loading.  Each regulator i keeps a local estimate v_bar
// of the network average voltage and an accumulated reference correction dx:
//
//   v_bar_i += epsilon * sum_j (v_bar_j - v_bar_i) + (v_i - v_i_previous)
//   dx_i    += k_v * (v_rated - v_bar_i) + k_c * sum_j (i_pu_j - i_pu_i)
//
// with i_pu = injected current / capacity and sums over communication
// neighbors within the regulator set.  The applied reference is the nominal
// one plus dx, held inside the converter's reference bounds (dx is clamped,
// which also prevents windup).  At the fixed point the regulators' mean bus
// voltage equals the rated voltage and per-unit currents are equal.

struct SecondaryGains {
  double epsilon = 0.3;  // consensus mixing; must stay below 1/max_degree
  double k_v = 0.05;     // voltage restoration gain
  double k_c = 0.05;     // current sharing gain
};

struct SecondaryState {
  std::vector<int> regulators;   // converter indices, ascending
  std::vector<double> x_nominal; // references as found at init
  std::vector<double> v_bar;
  std::vector<double> v_prev;
  std::vector<double> dx;
};

// Seeds estimates from a solve of the grid as passed; dx starts at zero.
SecondaryState init_secondary(const std::vector<int>& regulator_converters,
                              const GridSpec& grid);

// One synchronous control step: solve, update every v_bar, then every dx,
// then write the corrected references back into the grid.  `reg_adjacency`
// indexes into state.regulators.  Returns the solved state it acted on.
SteadyState secondary_step(SecondaryState& state, GridSpec& grid,
                           const std::vector<std::vector<int>>& reg_adjacency,
                           const SecondaryGains& gains);

// Restores the nominal references this state had been correcting.
void release_secondary(const SecondaryState& state, GridSpec& grid);

// --- Regulator-set reconfiguration over power talk ---------------------------
//
// When the wireless graph changes (e.g. jamming), the DERs re-elect the
// regulator set over the power line: every DER broadcasts its neighbor
// bitmap plus its quantized capacity in one CRC-protected session.  Each DER
// then rebuilds the topology (a link counts only if both endpoints report
// it) and runs the same selection rule, so agreement follows from identical
// inputs; the outcome is only accepted if every DER decoded identical data.

struct ReconfigOutcome {
  bool ok = false;
  std::string failure_reason;  // "session_aborted" | "views_disagree" | "no_valid_set"
  std::vector<int> regulators; // selected DER indices when ok
  std::vector<std::vector<int>> decoded_adjacency;
  int retries = 0;
  bool aborted = false;
  long slots_elapsed = 0;
  double energy_overhead_wh = 0.0;
};

BitString encode_reconfig_payload(const std::vector<int>& neighbors, int num_nodes,
                                  std::uint32_t capacity_code, int capacity_bits);

// der_converters[i] is the grid converter operated by DER i.
ReconfigOutcome run_reconfiguration(const GridSpec& grid, const PowerTalkParams& params,
                                    const std::vector<int>& der_converters,
                                    const std::vector<DerNode>& ders,
                                    const std::vector<std::vector<int>>& adjacency,
                                    int regulator_count, int capacity_bits,
                                    double capacity_full_scale_watts,
                                    const RngKey& rng_key,
                                    const SessionOptions& options = {});

}  // namespace powertalk
