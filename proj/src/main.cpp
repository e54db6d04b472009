#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "forestwalk/analysis.hpp"
#include "forestwalk/sim.hpp"
#include "forestwalk/snapshot.hpp"

namespace {

using namespace forestwalk;

constexpr const char* kSchemaNote =
    "CSV schema (all commands): scenario,policy,memory_n,seed,iteration,measurement,value\n"
    "  merge rows:  one per iteration, measurement merging_time_steps (or\n"
    "               merging_timeout_steps when the step budget ran out)\n"
    "  mixing rows: one per checkpoint, iteration column = checkpoint step,\n"
    "               measurement mean_distance_pct\n"
    "  simulate rows: one per tick per quantity (token_count, tree_count,\n"
    "               largest_tree_order), iteration column = tick\n"
    "Seed precedence: --seed flag, then FORESTWALK_SEED env var, then config file.\n"
    "Exit codes: 0 ok, 2 config error, 3 timeout-dominated run, 4 invariant violation.";

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("FORESTWALK_SEED");
    if (!raw || !*raw) return std::nullopt;
    std::string text(raw);
    if (text.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("FORESTWALK_SEED must be a decimal unsigned integer, got \"" + text +
                          "\"");
    }
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        throw ConfigError("FORESTWALK_SEED out of range: \"" + text + "\"");
    }
}

enum class OutputFormat { Csv, Json };

OutputFormat parse_format(const std::string& text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    throw ConfigError("--format must be csv or json, got \"" + text + "\"");
}

void write_report_to(const ExperimentReport& report, const std::string& out_path,
                     OutputFormat format) {
    const auto emit = [&](std::ostream& os) {
        if (format == OutputFormat::Csv) {
            write_csv(report, os);
        } else {
            write_json(report, os);
        }
    };
    if (out_path.empty()) {
        emit(std::cout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + out_path + " for writing");
    emit(out);
}

// Flags shared by the two experiment commands.
struct ExperimentFlags {
    std::string config_path;
    std::string out_path;
    std::string format_text = "csv";
    std::size_t workers = 1;
    std::optional<std::uint64_t> seed_flag;
    std::optional<unsigned> memory_flag;
    std::string memory_range;
    std::optional<std::size_t> iterations_flag;
};

void register_experiment_flags(CLI::App* cmd, ExperimentFlags& flags) {
    cmd->add_option("--config", flags.config_path, "scenario config JSON")->required();
    cmd->add_option("--seed", flags.seed_flag, "master seed (overrides env and config)");
    cmd->add_option("--memory", flags.memory_flag, "run a single memory level N");
    cmd->add_option("--memory-range", flags.memory_range, "run memory levels A..B inclusive");
    cmd->add_option("--iterations", flags.iterations_flag, "override iteration count");
    cmd->add_option("--out", flags.out_path, "output file (default: stdout)");
    cmd->add_option("--format", flags.format_text, "csv or json (default csv)");
    cmd->add_option("--workers", flags.workers,
                    "worker threads (output is identical for any value)");
}

ScenarioConfig apply_overrides(const ExperimentFlags& flags) {
    ScenarioConfig config = load_scenario_config(flags.config_path);
    if (flags.seed_flag) {
        config.seed = *flags.seed_flag;
    } else if (auto seed = env_seed()) {
        config.seed = *seed;
    }
    if (flags.iterations_flag) {
        if (*flags.iterations_flag < 1) throw ConfigError("--iterations must be >= 1");
        config.iterations = *flags.iterations_flag;
    }
    if (flags.memory_flag && !flags.memory_range.empty()) {
        throw ConfigError("--memory and --memory-range are mutually exclusive");
    }
    if (flags.memory_flag) {
        config.memory_levels = {*flags.memory_flag};
    } else if (!flags.memory_range.empty()) {
        unsigned lo = 0, hi = 0;
        char dot1 = 0, dot2 = 0;
        std::istringstream in(flags.memory_range);
        if (!(in >> lo >> dot1 >> dot2 >> hi) || dot1 != '.' || dot2 != '.' || !in.eof() ||
            lo > hi) {
            throw ConfigError("--memory-range wants A..B with A <= B, got \"" +
                              flags.memory_range + "\"");
        }
        config.memory_levels.clear();
        for (unsigned n = lo; n <= hi; ++n) config.memory_levels.push_back(n);
    }
    return config;
}

std::vector<WalkPolicy> summary_policies(const ScenarioConfig& config) {
    std::vector<WalkPolicy> out;
    if (config.memory_levels.empty()) {
        out.push_back(config.policy);
    } else {
        for (unsigned n : config.memory_levels) out.push_back(WalkPolicy::memory(n));
    }
    return out;
}

std::string aggregate_key_for(const WalkPolicy& policy) {
    return policy.kind == WalkPolicy::Kind::Uniform ? "uniform"
                                                    : "memory_" + std::to_string(policy.memory_n);
}

int finish_experiment(const ScenarioConfig& config, const ExperimentReport& report,
                      const ExperimentFlags& flags, bool mixing) {
    write_report_to(report, flags.out_path, parse_format(flags.format_text));
    if (!flags.out_path.empty()) {
        // Human summary goes to stdout only when the data went to a file.
        if (mixing) {
            for (const WalkPolicy& p : summary_policies(config)) {
                std::cout << aggregate_key_for(p) << ":";
                for (std::uint64_t cp : config.checkpoints) {
                    const auto it =
                        report.aggregates.find(aggregate_key_for(p) + "_at_" + std::to_string(cp));
                    std::cout << ' ' << cp << "=" << format_value(it->second.mean) << '%';
                }
                std::cout << '\n';
            }
        } else {
            std::cout << "policy mean_steps stddev stderr n\n";
            for (const WalkPolicy& p : summary_policies(config)) {
                const auto it = report.aggregates.find(aggregate_key_for(p));
                if (it == report.aggregates.end()) {
                    std::cout << aggregate_key_for(p) << " (all iterations timed out)\n";
                    continue;
                }
                std::cout << aggregate_key_for(p) << ' ' << format_value(it->second.mean) << ' '
                          << format_value(it->second.stddev) << ' '
                          << format_value(it->second.stderr_mean) << ' ' << it->second.count
                          << '\n';
            }
        }
        if (report.timeout_count > 0) {
            std::cout << "timeouts: " << report.timeout_count << '\n';
        }
    }
    const std::size_t total =
        config.iterations * std::max<std::size_t>(1, summary_policies(config).size());
    if (report.timeout_count * 2 > total) {
        std::cerr << "timeout-dominated run: " << report.timeout_count << " of " << total
                  << " iterations hit the step budget\n";
        return 3;
    }
    return 0;
}

// Load a two-tree instance snapshot and hand back its trees.
std::pair<TreeView, TreeView> two_trees(const LabelledGraph& graph) {
    std::vector<TreeView> views = forest(graph);
    if (views.size() != 2) {
        throw ConfigError("instance must contain exactly 2 trees, found " +
                          std::to_string(views.size()));
    }
    return {views[0], views[1]};
}

WalkPolicy parse_policy_text(const std::string& text) {
    if (text == "uniform") return WalkPolicy::uniform();
    if (text.rfind("memory:", 0) == 0) {
        const std::string n_text = text.substr(7);
        if (n_text.empty() || n_text.find_first_not_of("0123456789") != std::string::npos) {
            throw ConfigError("--policy memory:N wants a nonnegative integer N");
        }
        return WalkPolicy::memory(static_cast<unsigned>(std::stoul(n_text)));
    }
    throw ConfigError("--policy must be \"uniform\" or \"memory:N\", got \"" + text + "\"");
}

TopologyEvent::Kind parse_event_kind(const std::string& text) {
    if (text == "edge_up") return TopologyEvent::Kind::EdgeUp;
    if (text == "edge_down") return TopologyEvent::Kind::EdgeDown;
    if (text == "vertex_up") return TopologyEvent::Kind::VertexUp;
    if (text == "vertex_down") return TopologyEvent::Kind::VertexDown;
    throw ConfigError("unknown event kind \"" + text + "\"");
}

std::vector<TopologyEvent> load_events(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open events file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("cannot parse events file: ") + e.what());
    }
    if (!doc.is_array()) throw ConfigError("events file must be a JSON array");
    std::vector<TopologyEvent> events;
    try {
        for (const auto& entry : doc) {
            TopologyEvent ev;
            ev.at_step = entry.at("at_step").get<std::uint64_t>();
            ev.kind = parse_event_kind(entry.at("kind").get<std::string>());
            ev.u = entry.at("u").get<VertexId>();
            if (ev.kind == TopologyEvent::Kind::EdgeUp ||
                ev.kind == TopologyEvent::Kind::EdgeDown) {
                ev.v = entry.at("v").get<VertexId>();
            }
            events.push_back(ev);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed event: ") + e.what());
    }
    return events;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"forestwalk: spanning-forest maintenance protocol - simulator and analysis"};
    app.footer(kSchemaNote);
    app.require_subcommand(1);

    // merge-experiment ------------------------------------------------------
    ExperimentFlags merge_flags;
    CLI::App* merge_cmd = app.add_subcommand(
        "merge-experiment", "two random trees with bridges; measure steps until they merge");
    register_experiment_flags(merge_cmd, merge_flags);

    // mixing-experiment -----------------------------------------------------
    ExperimentFlags mixing_flags;
    CLI::App* mixing_cmd = app.add_subcommand(
        "mixing-experiment", "token walk on one tree; occupancy vs stationary at checkpoints");
    register_experiment_flags(mixing_cmd, mixing_flags);

    // expected ---------------------------------------------------------------
    std::vector<std::uint64_t> expected_args;
    std::string expected_instance;
    CLI::App* expected_cmd = app.add_subcommand(
        "expected", "closed-form expected merging time (orders form uses the "
                    "average-degree approximation; --instance uses the exact bridge sum)");
    expected_cmd->add_option("orders", expected_args, "ORDER1 ORDER2 BRIDGES")->expected(0, 3);
    expected_cmd->add_option("--instance", expected_instance, "two-tree snapshot JSON");

    // oracle ------------------------------------------------------------------
    std::string oracle_instance;
    CLI::App* oracle_cmd = app.add_subcommand(
        "oracle", "exact expected merging time from the first-passage linear system");
    oracle_cmd->add_option("--instance", oracle_instance, "two-tree snapshot JSON")->required();

    // simulate ----------------------------------------------------------------
    std::string sim_snapshot, sim_events, sim_out, sim_policy_text = "uniform",
                               sim_format = "csv";
    std::uint64_t sim_budget = 1000;
    std::optional<std::uint64_t> sim_seed;
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "drive a snapshot through a timed event schedule");
    simulate_cmd->add_option("--snapshot", sim_snapshot, "initial graph snapshot JSON")
        ->required();
    simulate_cmd->add_option("--events", sim_events, "topology events JSON array");
    simulate_cmd->add_option("--budget", sim_budget, "ticks to run (default 1000)");
    simulate_cmd->add_option("--policy", sim_policy_text, "uniform or memory:N");
    simulate_cmd->add_option("--seed", sim_seed, "seed (overrides FORESTWALK_SEED)");
    simulate_cmd->add_option("--out", sim_out, "output file (default: stdout)");
    simulate_cmd->add_option("--format", sim_format, "csv or json (default csv)");

    // validate-snapshot --------------------------------------------------------
    std::string validate_path;
    CLI::App* validate_cmd =
        app.add_subcommand("validate-snapshot", "check a snapshot's forest invariants");
    validate_cmd->add_option("path", validate_path, "snapshot JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (merge_cmd->parsed()) {
        const ScenarioConfig config = apply_overrides(merge_flags);
        const ExperimentReport report = run_merge_experiment(config, merge_flags.workers);
        return finish_experiment(config, report, merge_flags, /*mixing=*/false);
    }

    if (mixing_cmd->parsed()) {
        const ScenarioConfig config = apply_overrides(mixing_flags);
        const ExperimentReport report = run_mixing_experiment(config, mixing_flags.workers);
        return finish_experiment(config, report, mixing_flags, /*mixing=*/true);
    }

    if (expected_cmd->parsed()) {
        if (!expected_instance.empty()) {
            if (!expected_args.empty()) {
                throw ConfigError("expected: give ORDER1 ORDER2 BRIDGES or --instance, not both");
            }
            const LabelledGraph graph = load_snapshot(expected_instance);
            const auto [t1, t2] = two_trees(graph);
            const BridgeSet b = bridges(graph, t1, t2);
            std::cout << format_value(expected_merging_time(t1, t2, b)) << '\n';
            return 0;
        }
        if (expected_args.size() != 3) {
            throw ConfigError("expected: wants ORDER1 ORDER2 BRIDGES (or --instance PATH)");
        }
        if (expected_args[0] < 2 || expected_args[1] < 2) {
            throw ConfigError("expected: tree orders must be >= 2");
        }
        if (expected_args[2] < 1) {
            throw ConfigError("expected: bridge count must be >= 1");
        }
        std::cout << format_value(avg_degree_expected_merging_time(
                         static_cast<std::size_t>(expected_args[0]),
                         static_cast<std::size_t>(expected_args[1]),
                         static_cast<std::size_t>(expected_args[2])))
                  << '\n';
        return 0;
    }

    if (oracle_cmd->parsed()) {
        const LabelledGraph graph = load_snapshot(oracle_instance);
        const auto [t1, t2] = two_trees(graph);
        const BridgeSet b = bridges(graph, t1, t2);
        const double exact = markov_exact_merging_time(graph, t1, t2, WalkPolicy::uniform(),
                                                       SchedulerModel::UniformTokenSelection);
        std::cout << "markov_exact_moves " << format_value(exact) << '\n';
        std::cout << "eq4_expected_steps " << format_value(expected_merging_time(t1, t2, b))
                  << '\n';
        return 0;
    }

    if (simulate_cmd->parsed()) {
        LabelledGraph graph = load_snapshot(sim_snapshot);
        forest(graph); // reject structurally invalid starting states up front
        std::vector<TopologyEvent> events;
        if (!sim_events.empty()) events = load_events(sim_events);
        std::uint64_t seed = 0;
        if (sim_seed) {
            seed = *sim_seed;
        } else if (auto env = env_seed()) {
            seed = *env;
        }
        Rng rng(seed);
        const WalkPolicy policy = parse_policy_text(sim_policy_text);
        const std::vector<TrajectoryPoint> trajectory =
            run_dynamic_scenario(graph, events, policy, sim_budget, rng);

        ExperimentReport report;
        report.seed = seed;
        report.iteration_count = trajectory.size();
        report.config_echo = {{"snapshot", sim_snapshot},
                              {"events", sim_events},
                              {"budget", sim_budget},
                              {"policy", sim_policy_text}};
        for (const TrajectoryPoint& pt : trajectory) {
            const std::string policy_label =
                policy.kind == WalkPolicy::Kind::Uniform ? "uniform" : "memory";
            const auto push = [&](const std::string& what, double value) {
                MeasurementRow row;
                row.scenario = "simulate";
                row.policy = policy_label;
                row.memory_n = policy.memory_n;
                row.seed = seed;
                row.iteration = pt.tick;
                row.measurement = what;
                row.value = value;
                report.rows.push_back(std::move(row));
            };
            push("token_count", static_cast<double>(pt.token_count));
            push("tree_count", static_cast<double>(pt.tree_count));
            std::size_t largest = 0;
            for (std::size_t order : pt.tree_orders) largest = std::max(largest, order);
            push("largest_tree_order", static_cast<double>(largest));
        }
        write_report_to(report, sim_out, parse_format(sim_format));
        return 0;
    }

    if (validate_cmd->parsed()) {
        const LabelledGraph graph = load_snapshot(validate_path);
        const std::vector<TreeView> views = forest(graph);
        std::cout << "valid: " << views.size() << " trees, " << graph.vertex_count()
                  << " vertices, " << graph.edge_count() << " edges\n";
        return 0;
    }

    return 2; // unreachable: require_subcommand guarantees one branch ran
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const forestwalk::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const forestwalk::UnsupportedError& e) {
        std::cerr << "unsupported request: " << e.what() << '\n';
        return 2;
    } catch (const forestwalk::CorruptionError& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 4;
    } catch (const forestwalk::ContractViolation& e) {
        std::cerr << "internal contract violation: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}
