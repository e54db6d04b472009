#ifndef FORESTWALK_SIM_HPP
#define FORESTWALK_SIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forestwalk/analysis.hpp"
#include "forestwalk/graph.hpp"
#include "forestwalk/protocol.hpp"
#include "forestwalk/report.hpp"
#include "forestwalk/rng.hpp"

namespace forestwalk {

// --- instance generators ----------------------------------------------------

// Append a uniformly random labelled tree on `order` fresh vertices to the
// graph (uniform via the random-sequence-to-tree bijection), with edge labels
// oriented toward a uniformly chosen token holder. Returns the new ids.
std::vector<VertexId> random_tree(LabelledGraph& graph, std::size_t order, Rng& rng);

// Add `count` distinct uniformly chosen cross edges (Null/Null) between two
// disjoint trees. Returns them as a BridgeSet.
BridgeSet add_random_bridges(LabelledGraph& graph, const TreeView& t1, const TreeView& t2,
                             std::size_t count, Rng& rng);

// --- single runs -------------------------------------------------------------

struct MergeRunResult {
    std::uint64_t steps = 0; // ticks consumed (the merging application is a step)
    bool merged = false;     // false = step budget exhausted (timeout)
};

// Drive a prepared two-tree instance until its tokens merge: one uniformly
// chosen token steps per tick (merge attempt first, then circulation).
MergeRunResult run_until_merged(LabelledGraph& graph, MemoryTable& memory,
                                const WalkPolicy& policy, Rng& rng, std::uint64_t step_budget);

// One tick of the dynamic scheduler as observed by run_dynamic_scenario.
struct TrajectoryPoint {
    std::uint64_t tick = 0;
    std::size_t token_count = 0;
    std::size_t tree_count = 0;
    std::vector<std::size_t> tree_orders;
};

// Apply timed topology events interleaved with token steps for `budget`
// ticks. Events due at tick t are applied (with their r1/r2 reactions)
// before tick t's token move; the forest invariants are asserted at every
// quiescent instant and a CorruptionError names the first violation.
std::vector<TrajectoryPoint> run_dynamic_scenario(LabelledGraph& graph,
                                                  std::vector<TopologyEvent> events,
                                                  const WalkPolicy& policy, std::uint64_t budget,
                                                  Rng& rng);

// --- config-driven experiments ----------------------------------------------

// Parsed scenario file. Merge experiments need two tree orders and a bridge
// count; mixing experiments need one tree order and occupancy checkpoints.
struct ScenarioConfig {
    enum class Measurement { MergingTime, Occupancy };

    std::string scenario;
    std::vector<std::size_t> tree_orders;
    std::size_t bridge_count = 0;
    WalkPolicy policy = WalkPolicy::uniform();
    std::vector<unsigned> memory_levels; // optional sweep; overrides policy
    std::uint64_t seed = 0;
    std::size_t iterations = 1;
    std::uint64_t step_budget = 1000000;
    Measurement measurement = Measurement::MergingTime;
    std::vector<std::uint64_t> checkpoints;

    nlohmann::json echo; // original document, echoed into reports
};

// Throws ConfigError (with the offending field's path) on invalid documents.
ScenarioConfig parse_scenario_config(const nlohmann::json& doc);
ScenarioConfig load_scenario_config(const std::string& path);

// Merging-time experiment: per iteration, generate two random trees, add the
// bridges, run until merged. Iterations run on independent RNG substreams
// keyed by iteration index; reports are bit-identical for any worker count.
// With a memory_levels sweep, iteration i sees the same instance at every
// level (the instance stream does not depend on the level).
ExperimentReport run_merge_experiment(const ScenarioConfig& config, std::size_t workers);

// Mixing-time experiment: per run, one fresh random tree; the token walks
// and the empirical occupancy (arrival counts over the first S steps) is
// compared against the stationary values at each checkpoint S. Rows carry
// the run-averaged distance per (memory level, checkpoint).
ExperimentReport run_mixing_experiment(const ScenarioConfig& config, std::size_t workers);

} // namespace forestwalk

#endif // FORESTWALK_SIM_HPP
