#include "forestwalk/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <deque>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

namespace forestwalk {

namespace {

std::string policy_name(const WalkPolicy& policy) {
    return policy.kind == WalkPolicy::Kind::Uniform ? "uniform" : "memory";
}

std::string aggregate_key(const WalkPolicy& policy) {
    if (policy.kind == WalkPolicy::Kind::Uniform) return "uniform";
    return "memory_" + std::to_string(policy.memory_n);
}

} // namespace

std::vector<VertexId> random_tree(LabelledGraph& graph, std::size_t order, Rng& rng) {
    if (order == 0) {
        throw ContractViolation("random_tree: order must be >= 1");
    }
    std::vector<VertexId> ids;
    ids.reserve(order);
    for (std::size_t i = 0; i < order; ++i) ids.push_back(graph.add_vertex());
    if (order == 1) return ids; // a one-vertex tree owning its token

    // Uniform labelled tree via the sequence-to-tree bijection: a uniform
    // sequence of length order-2 over the vertex indices decodes to each of
    // the order^(order-2) labelled trees exactly once.
    std::vector<std::pair<std::size_t, std::size_t>> local_edges;
    if (order == 2) {
        local_edges.emplace_back(0, 1);
    } else {
        std::vector<std::size_t> seq(order - 2);
        for (std::size_t& s : seq) s = rng.uniform_index(order);
        std::vector<std::size_t> degree(order, 1);
        for (std::size_t s : seq) ++degree[s];
        std::set<std::size_t> leaves;
        for (std::size_t i = 0; i < order; ++i) {
            if (degree[i] == 1) leaves.insert(i);
        }
        for (std::size_t s : seq) {
            const std::size_t leaf = *leaves.begin();
            leaves.erase(leaves.begin());
            local_edges.emplace_back(leaf, s);
            if (--degree[s] == 1) leaves.insert(s);
        }
        const std::size_t x = *leaves.begin();
        const std::size_t y = *std::next(leaves.begin());
        local_edges.emplace_back(x, y);
    }

    std::vector<std::vector<std::size_t>> adjacency(order);
    for (auto [a, b] : local_edges) {
        graph.add_edge(ids[a], ids[b]);
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }

    // Orient every edge toward a uniformly chosen token holder: the holder
    // keeps state Token, everyone else turns Plain with its parent edge
    // labelled TowardToken on the child side.
    const std::size_t root = rng.uniform_index(order);
    std::vector<std::ptrdiff_t> parent(order, -1);
    std::deque<std::size_t> frontier{root};
    std::vector<bool> seen(order, false);
    seen[root] = true;
    while (!frontier.empty()) {
        const std::size_t v = frontier.front();
        frontier.pop_front();
        for (std::size_t w : adjacency[v]) {
            if (!seen[w]) {
                seen[w] = true;
                parent[w] = static_cast<std::ptrdiff_t>(v);
                frontier.push_back(w);
            }
        }
    }
    for (std::size_t v = 0; v < order; ++v) {
        if (v == root) continue;
        graph.set_vertex_state(ids[v], VertexState::Plain);
        const std::size_t p = static_cast<std::size_t>(parent[v]);
        graph.set_edge_labels(ids[v], ids[p], EndpointLabel::TowardToken,
                              EndpointLabel::TowardChild);
    }
    return ids;
}

BridgeSet add_random_bridges(LabelledGraph& graph, const TreeView& t1, const TreeView& t2,
                             std::size_t count, Rng& rng) {
    for (VertexId v : t1.vertices) {
        if (t2.vertices.count(v)) {
            throw ContractViolation("add_random_bridges: trees are not disjoint");
        }
    }
    std::vector<std::pair<VertexId, VertexId>> pairs;
    pairs.reserve(t1.vertices.size() * t2.vertices.size());
    for (VertexId u : t1.vertices) {
        for (VertexId v : t2.vertices) pairs.emplace_back(u, v);
    }
    if (count > pairs.size()) {
        throw ConfigError("add_random_bridges: " + std::to_string(count) +
                          " bridges requested but only " + std::to_string(pairs.size()) +
                          " distinct cross pairs exist");
    }
    // Partial Fisher-Yates: the first `count` slots end up a uniform sample
    // of distinct pairs.
    for (std::size_t i = 0; i < count; ++i) {
        std::swap(pairs[i], pairs[i + rng.uniform_index(pairs.size() - i)]);
    }
    BridgeSet out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto [u, v] = pairs[i];
        graph.add_edge(u, v); // Null/Null: merging only happens via r3
        out.pairs.push_back({u, v, t1.degree.at(u), t2.degree.at(v)});
    }
    std::sort(out.pairs.begin(), out.pairs.end(), [](const BridgePair& a, const BridgePair& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    return out;
}

MergeRunResult run_until_merged(LabelledGraph& graph, MemoryTable& memory,
                                const WalkPolicy& policy, Rng& rng, std::uint64_t step_budget) {
    std::vector<VertexId> tokens;
    for (VertexId v : graph.vertex_ids()) {
        if (graph.state_of(v) == VertexState::Token) tokens.push_back(v);
    }
    if (tokens.size() != 2) {
        throw ContractViolation("run_until_merged: expected exactly 2 tokens, found " +
                                std::to_string(tokens.size()));
    }
    MergeRunResult result;
    while (result.steps < step_budget) {
        ++result.steps;
        const std::size_t pick = rng.uniform_index(tokens.size());
        const StepOutcome outcome = step_token(graph, tokens[pick], policy, memory, rng);
        if (outcome.kind == StepOutcome::Kind::Merged) {
            result.merged = true;
            return result;
        }
        if (outcome.kind == StepOutcome::Kind::Moved) {
            tokens[pick] = outcome.other;
        }
    }
    result.merged = false; // timeout: steps carries the exhausted budget
    return result;
}

namespace {

void validate_events(const LabelledGraph& graph, const std::vector<TopologyEvent>& events) {
    std::set<VertexId> live;
    for (VertexId v : graph.vertex_ids()) live.insert(v);
    std::set<EdgeKey> edges;
    for (const EdgeKey& e : graph.edge_keys()) edges.insert(e);

    for (std::size_t i = 0; i < events.size(); ++i) {
        const TopologyEvent& ev = events[i];
        const std::string where = "event " + std::to_string(i) + " (step " +
                                  std::to_string(ev.at_step) + ")";
        switch (ev.kind) {
        case TopologyEvent::Kind::EdgeUp:
            if (ev.u == ev.v) throw ConfigError(where + ": self-loop");
            if (!live.count(ev.u) || !live.count(ev.v)) {
                throw ConfigError(where + ": dangling endpoint");
            }
            if (edges.count(EdgeKey(ev.u, ev.v))) throw ConfigError(where + ": duplicate edge");
            edges.insert(EdgeKey(ev.u, ev.v));
            break;
        case TopologyEvent::Kind::EdgeDown:
            if (!edges.count(EdgeKey(ev.u, ev.v))) throw ConfigError(where + ": no such edge");
            edges.erase(EdgeKey(ev.u, ev.v));
            break;
        case TopologyEvent::Kind::VertexUp:
            if (live.count(ev.u)) throw ConfigError(where + ": vertex already live");
            live.insert(ev.u);
            break;
        case TopologyEvent::Kind::VertexDown: {
            if (!live.count(ev.u)) throw ConfigError(where + ": vertex not live");
            live.erase(ev.u);
            std::vector<EdgeKey> incident;
            for (const EdgeKey& e : edges) {
                if (e.a == ev.u || e.b == ev.u) incident.push_back(e);
            }
            for (const EdgeKey& e : incident) edges.erase(e);
            break;
        }
        }
    }
}

void apply_event(LabelledGraph& graph, const TopologyEvent& ev, MemoryTable& memory,
                 std::set<VertexId>& tokens) {
    switch (ev.kind) {
    case TopologyEvent::Kind::EdgeUp:
        graph.add_edge(ev.u, ev.v);
        break;
    case TopologyEvent::Kind::EdgeDown: {
        const RemovalNotice notice = graph.remove_edge(ev.u, ev.v);
        react_edge_down(graph, notice, memory);
        if (notice.label_u == EndpointLabel::TowardToken) tokens.insert(notice.u);
        if (notice.label_v == EndpointLabel::TowardToken) tokens.insert(notice.v);
        break;
    }
    case TopologyEvent::Kind::VertexUp:
        graph.add_vertex_with_id(ev.u, VertexState::Token);
        tokens.insert(ev.u);
        break;
    case TopologyEvent::Kind::VertexDown: {
        // Node failure = simultaneous failure of all its edges, then the
        // vertex (and its token, if any) disappears.
        const std::set<VertexId> adjacent = graph.neighbors(ev.u);
        for (VertexId w : adjacent) {
            const RemovalNotice notice = graph.remove_edge(ev.u, w);
            react_edge_down(graph, notice, memory);
            if (notice.label_u == EndpointLabel::TowardToken && graph.has_vertex(notice.u)) {
                tokens.insert(notice.u);
            }
            if (notice.label_v == EndpointLabel::TowardToken) tokens.insert(notice.v);
        }
        tokens.erase(ev.u);
        memory.purge_vertex(ev.u);
        graph.remove_vertex(ev.u);
        break;
    }
    }
}

} // namespace

std::vector<TrajectoryPoint> run_dynamic_scenario(LabelledGraph& graph,
                                                  std::vector<TopologyEvent> events,
                                                  const WalkPolicy& policy, std::uint64_t budget,
                                                  Rng& rng) {
    std::stable_sort(events.begin(), events.end(),
                     [](const TopologyEvent& a, const TopologyEvent& b) {
                         return a.at_step < b.at_step;
                     });
    validate_events(graph, events);

    MemoryTable memory;
    std::set<VertexId> tokens;
    for (VertexId v : graph.vertex_ids()) {
        if (graph.state_of(v) == VertexState::Token) tokens.insert(v);
    }

    std::vector<TrajectoryPoint> trajectory;
    trajectory.reserve(budget);
    std::size_t next_event = 0;

    for (std::uint64_t tick = 0; tick < budget; ++tick) {
        while (next_event < events.size() && events[next_event].at_step <= tick) {
            apply_event(graph, events[next_event], memory, tokens);
            ++next_event;
        }

        // Quiescent: all reactions applied. The labelling must encode a
        // valid forest with one token per tree, right now.
        const std::vector<TreeView> views = forest(graph);
        if (views.size() != tokens.size()) {
            throw CorruptionError("token count " + std::to_string(tokens.size()) +
                                  " != tree count " + std::to_string(views.size()) + " at tick " +
                                  std::to_string(tick));
        }
        TrajectoryPoint point;
        point.tick = tick;
        point.token_count = tokens.size();
        point.tree_count = views.size();
        for (const TreeView& t : views) point.tree_orders.push_back(t.order());
        trajectory.push_back(std::move(point));

        if (!tokens.empty()) {
            auto it = tokens.begin();
            std::advance(it, rng.uniform_index(tokens.size()));
            const VertexId v = *it;
            const StepOutcome outcome = step_token(graph, v, policy, memory, rng);
            if (outcome.kind == StepOutcome::Kind::Merged) {
                tokens.erase(outcome.other);
            } else if (outcome.kind == StepOutcome::Kind::Moved) {
                tokens.erase(v);
                tokens.insert(outcome.other);
            }
        }
    }
    return trajectory;
}

// --- configs ------------------------------------------------------------------

namespace {

[[noreturn]] void config_fail(const std::string& path, const std::string& why) {
    throw ConfigError("config field " + path + ": " + why);
}

std::uint64_t require_u64(const nlohmann::json& doc, const std::string& path) {
    // Text documents store nonnegative integers as unsigned, but documents
    // assembled in memory may carry them as signed values; accept both.
    if (!doc.is_number_unsigned() &&
        !(doc.is_number_integer() && doc.get<std::int64_t>() >= 0)) {
        config_fail(path, "must be a nonnegative integer");
    }
    return doc.get<std::uint64_t>();
}

bool plain_identifier(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    }
    return true;
}

} // namespace

ScenarioConfig parse_scenario_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    ScenarioConfig cfg;
    cfg.echo = doc;

    if (!doc.contains("scenario") || !doc.at("scenario").is_string()) {
        config_fail("scenario", "must be a string");
    }
    cfg.scenario = doc.at("scenario").get<std::string>();
    if (!plain_identifier(cfg.scenario)) {
        config_fail("scenario", "must match [A-Za-z0-9_-]+ (it is embedded in CSV)");
    }

    if (!doc.contains("generator") || !doc.at("generator").is_object()) {
        config_fail("generator", "must be an object");
    }
    const auto& gen = doc.at("generator");
    if (!gen.contains("tree_orders") || !gen.at("tree_orders").is_array()) {
        config_fail("generator.tree_orders", "must be an array of tree orders");
    }
    for (const auto& entry : gen.at("tree_orders")) {
        const std::uint64_t order = require_u64(entry, "generator.tree_orders[]");
        if (order == 0) config_fail("generator.tree_orders[]", "orders must be >= 1");
        cfg.tree_orders.push_back(static_cast<std::size_t>(order));
    }
    if (gen.contains("bridges")) {
        cfg.bridge_count = static_cast<std::size_t>(require_u64(gen.at("bridges"), "generator.bridges"));
    }

    if (doc.contains("policy")) {
        if (!doc.at("policy").is_object() || !doc.at("policy").contains("kind")) {
            config_fail("policy", "must be an object with a \"kind\"");
        }
        const std::string kind = doc.at("policy").at("kind").get<std::string>();
        if (kind == "uniform") {
            cfg.policy = WalkPolicy::uniform();
        } else if (kind == "memory") {
            const std::uint64_t n =
                doc.at("policy").contains("n") ? require_u64(doc.at("policy").at("n"), "policy.n") : 0;
            cfg.policy = WalkPolicy::memory(static_cast<unsigned>(n));
        } else {
            config_fail("policy.kind", "must be \"uniform\" or \"memory\"");
        }
    }

    if (doc.contains("memory_levels")) {
        if (!doc.at("memory_levels").is_array() || doc.at("memory_levels").empty()) {
            config_fail("memory_levels", "must be a non-empty array");
        }
        for (const auto& entry : doc.at("memory_levels")) {
            cfg.memory_levels.push_back(
                static_cast<unsigned>(require_u64(entry, "memory_levels[]")));
        }
    }

    if (!doc.contains("seed")) config_fail("seed", "is required (reproducibility contract)");
    cfg.seed = require_u64(doc.at("seed"), "seed");

    if (!doc.contains("iterations")) config_fail("iterations", "is required");
    cfg.iterations = static_cast<std::size_t>(require_u64(doc.at("iterations"), "iterations"));
    if (cfg.iterations < 1) config_fail("iterations", "must be >= 1");

    if (doc.contains("step_budget")) {
        cfg.step_budget = require_u64(doc.at("step_budget"), "step_budget");
        if (cfg.step_budget < 1) config_fail("step_budget", "must be >= 1");
    }

    if (!doc.contains("measurement")) config_fail("measurement", "is required");
    const auto& meas = doc.at("measurement");
    if (meas.is_string() && meas.get<std::string>() == "merging_time") {
        cfg.measurement = ScenarioConfig::Measurement::MergingTime;
        if (cfg.tree_orders.size() != 2) {
            config_fail("generator.tree_orders", "merging experiments need exactly 2 orders");
        }
        if (cfg.bridge_count < 1) {
            config_fail("generator.bridges", "merging experiments need >= 1 bridge");
        }
    } else if (meas.is_object() && meas.contains("occupancy_checkpoints")) {
        cfg.measurement = ScenarioConfig::Measurement::Occupancy;
        const auto& cps = meas.at("occupancy_checkpoints");
        if (!cps.is_array() || cps.empty()) {
            config_fail("measurement.occupancy_checkpoints", "must be a non-empty array");
        }
        for (const auto& entry : cps) {
            cfg.checkpoints.push_back(require_u64(entry, "measurement.occupancy_checkpoints[]"));
        }
        for (std::size_t i = 0; i + 1 < cfg.checkpoints.size(); ++i) {
            if (cfg.checkpoints[i] >= cfg.checkpoints[i + 1]) {
                config_fail("measurement.occupancy_checkpoints", "must be strictly increasing");
            }
        }
        if (cfg.checkpoints.front() == 0) {
            config_fail("measurement.occupancy_checkpoints", "checkpoints start at step 1");
        }
        if (cfg.tree_orders.size() != 1) {
            config_fail("generator.tree_orders", "mixing experiments need exactly 1 order");
        }
        if (cfg.tree_orders[0] < 2) {
            config_fail("generator.tree_orders", "mixing needs order >= 2 (stationary undefined)");
        }
    } else {
        config_fail("measurement",
                    "must be \"merging_time\" or {\"occupancy_checkpoints\": [...]}");
    }
    return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse config " + path + ": " + e.what());
    }
    return parse_scenario_config(doc);
}

// --- experiment runners -------------------------------------------------------

namespace {

std::vector<WalkPolicy> sweep_policies(const ScenarioConfig& config) {
    std::vector<WalkPolicy> out;
    if (config.memory_levels.empty()) {
        out.push_back(config.policy);
    } else {
        for (unsigned n : config.memory_levels) out.push_back(WalkPolicy::memory(n));
    }
    return out;
}

// Run `count` jobs across `workers` threads, each job keyed by its index.
// Results land in index order, so output never depends on the worker count.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job) {
    workers = std::max<std::size_t>(1, workers);
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace

ExperimentReport run_merge_experiment(const ScenarioConfig& config, std::size_t workers) {
    if (config.measurement != ScenarioConfig::Measurement::MergingTime) {
        throw ConfigError("run_merge_experiment needs measurement \"merging_time\"");
    }
    ExperimentReport report;
    report.config_echo = config.echo;
    report.seed = config.seed;
    report.iteration_count = config.iterations;

    for (const WalkPolicy& policy : sweep_policies(config)) {
        std::vector<MergeRunResult> results(config.iterations);
        parallel_for(config.iterations, workers, [&](std::size_t i) {
            // The instance stream depends only on (seed, iteration): a
            // memory sweep sees the same instance at every level.
            Rng rng(substream_seed(config.seed, i));
            LabelledGraph graph;
            MemoryTable memory;
            const std::vector<VertexId> ids1 = random_tree(graph, config.tree_orders[0], rng);
            const std::vector<VertexId> ids2 = random_tree(graph, config.tree_orders[1], rng);
            const TreeView t1 = tree_of(graph, ids1.front());
            const TreeView t2 = tree_of(graph, ids2.front());
            add_random_bridges(graph, t1, t2, config.bridge_count, rng);
            results[i] = run_until_merged(graph, memory, policy, rng, config.step_budget);
        });

        std::vector<double> merged_steps;
        merged_steps.reserve(config.iterations);
        for (std::size_t i = 0; i < config.iterations; ++i) {
            MeasurementRow row;
            row.scenario = config.scenario;
            row.policy = policy_name(policy);
            row.memory_n = policy.memory_n;
            row.seed = config.seed;
            row.iteration = i;
            row.measurement =
                results[i].merged ? "merging_time_steps" : "merging_timeout_steps";
            row.value = static_cast<double>(results[i].steps);
            report.rows.push_back(std::move(row));
            if (results[i].merged) {
                merged_steps.push_back(static_cast<double>(results[i].steps));
            } else {
                ++report.timeout_count;
            }
        }
        if (!merged_steps.empty()) {
            report.aggregates[aggregate_key(policy)] = aggregate_values(merged_steps);
        }
    }
    return report;
}

ExperimentReport run_mixing_experiment(const ScenarioConfig& config, std::size_t workers) {
    if (config.measurement != ScenarioConfig::Measurement::Occupancy) {
        throw ConfigError("run_mixing_experiment needs measurement occupancy_checkpoints");
    }
    ExperimentReport report;
    report.config_echo = config.echo;
    report.seed = config.seed;
    report.iteration_count = config.iterations;

    const std::size_t n_cp = config.checkpoints.size();
    for (const WalkPolicy& policy : sweep_policies(config)) {
        // distances[run * n_cp + checkpoint]
        std::vector<double> distances(config.iterations * n_cp, 0.0);
        parallel_for(config.iterations, workers, [&](std::size_t r) {
            Rng rng(substream_seed(config.seed, r));
            LabelledGraph graph;
            MemoryTable memory;
            const std::vector<VertexId> ids = random_tree(graph, config.tree_orders[0], rng);
            const TreeView t = tree_of(graph, ids.front());
            const Distribution stationary = stationary_distribution(t);

            std::map<VertexId, std::uint64_t> occupancy;
            for (VertexId v : t.vertices) occupancy[v] = 0;

            VertexId pos = t.token_holder;
            std::size_t ci = 0;
            for (std::uint64_t step = 1; step <= config.checkpoints.back(); ++step) {
                const StepOutcome outcome = step_token(graph, pos, policy, memory, rng);
                if (outcome.kind != StepOutcome::Kind::Moved) {
                    throw CorruptionError("mixing walk stalled or merged on a single tree");
                }
                pos = outcome.other;
                ++occupancy[pos]; // arrival counts over the first S steps
                if (step == config.checkpoints[ci]) {
                    distances[r * n_cp + ci] =
                        distribution_distance(empirical_distribution(occupancy), stationary);
                    ++ci;
                }
            }
        });

        for (std::size_t ci = 0; ci < n_cp; ++ci) {
            std::vector<double> per_run;
            per_run.reserve(config.iterations);
            for (std::size_t r = 0; r < config.iterations; ++r) {
                per_run.push_back(distances[r * n_cp + ci]);
            }
            const Aggregate agg = aggregate_values(per_run);
            MeasurementRow row;
            row.scenario = config.scenario;
            row.policy = policy_name(policy);
            row.memory_n = policy.memory_n;
            row.seed = config.seed;
            row.iteration = config.checkpoints[ci]; // checkpoint step index
            row.measurement = "mean_distance_pct";
            row.value = agg.mean;
            report.rows.push_back(std::move(row));
            report.aggregates[aggregate_key(policy) + "_at_" +
                              std::to_string(config.checkpoints[ci])] = agg;
        }
    }
    return report;
}

} // namespace forestwalk
