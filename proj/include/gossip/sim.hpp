#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gossip/equilibrium.hpp"
#include "gossip/params.hpp"
#include "gossip/rng.hpp"

namespace gossip {

// Concrete simulation graph: undirected adjacency with per-node subscriber
// flags. Neighbor lists are sorted ascending; together with the receiver-major
// draw order below this fixes the random draw sequence of a slot.
struct SimTopology {
  std::vector<std::vector<int>> neighbors;
  std::vector<std::uint8_t> subscriber;

  int node_count() const { return static_cast<int>(neighbors.size()); }
  std::size_t directed_edge_count() const;
};

// One period of the line as a finite graph. cells = 1 gives the path
// 0..m with both endpoints subscribed; cells >= 2 concatenates that many
// periods into a ring, subscribers at multiples of m.
SimTopology build_line_segment(int m, int cells = 1);

SimTopology build_fully_connected(int n, int m_sub);

SimTopology build_graph_topology(const GeneralGraph& graph);

// Realizes any analytical topology as a simulation graph.
SimTopology realize(const Topology& topology, int cells = 1);

// Text format: optional "nodes N" line, one "i j" line per undirected edge,
// one or more "subscribers i j ..." lines; '#' starts a comment.
GeneralGraph load_graph_file(const std::string& path);

enum class SimMode { EnsembleAtT, TimeAverage };

struct SimConfig {
  std::uint64_t slots = 200'000;
  std::uint64_t iterations = 4;
  std::uint64_t burn_in = 0;       // time-average mode only
  std::uint64_t seed = 1;
  SimMode mode = SimMode::TimeAverage;
  int threads = 1;
};

// Slots to discard before time-averaging: ten times the slowest per-slot
// process.
std::uint64_t default_burn_in(const GameParams& params);

struct WorldState {
  std::int64_t server_age = 0;
  std::vector<std::int64_t> ages;

  explicit WorldState(int nodes) : ages(static_cast<std::size_t>(nodes), 0) {}

  std::vector<std::int64_t> scratch;  // workspace for advance()
};

// All randomness of one slot, drawn in the fixed documented order: the
// source update, the server sample, then one bit per directed edge grouped
// by receiver ascending and sender ascending within each receiver.
struct SlotDraws {
  bool event = false;
  bool server_sample = false;
  std::vector<std::uint8_t> edge;
};

void draw_slot(SlotDraws& draws, const SimTopology& topo,
               const GameParams& params, SplitMix64& rng);

// Applies one slot: the server keeps or refreshes its copy, every node takes
// the freshest of its own copy, successful gossip arrivals, and (for
// subscribers) the server copy, then all ages grow by the source update.
void advance(WorldState& state, const SimTopology& topo,
             const SlotDraws& draws);

void step(WorldState& state, const SimTopology& topo, const GameParams& params,
          SplitMix64& rng);

struct SimResult {
  std::vector<double> mean_age;
  std::vector<double> std_error;
  std::uint64_t samples = 0;  // independent samples behind each std_error
  SimConfig config;
  double wall_time_s = 0.0;  // informational; never serialized
};

// Runs the configured experiment. Ensemble mode averages the state at the
// final slot across iterations; time-average mode averages over the
// post-burn-in window and pools 32 fixed batch means per iteration for the
// standard error. Bit-exact for a given (seed, config) at any thread count.
SimResult run(const SimTopology& topo, const GameParams& params,
              const SimConfig& config);

// Empirical stability check: non-subscribers are judged on their simulated
// age; each subscriber is judged by re-running the world with only that
// subscription dropped. Verdicts closer than three standard errors to the
// threshold are flagged inconclusive.
StabilityReport empirical_stability(const SimTopology& topo,
                                    const GameParams& params,
                                    const SimConfig& config);

}  // namespace gossip
