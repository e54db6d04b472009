#ifndef FORESTWALK_REPORT_HPP
#define FORESTWALK_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace forestwalk {

// One CSV row. The column order is fixed across all commands:
//   scenario,policy,memory_n,seed,iteration,measurement,value
// For mixing curves the iteration column carries the checkpoint step index
// (one aggregate row per checkpoint) — documented in --help and the README.
struct MeasurementRow {
    std::string scenario;
    std::string policy;
    unsigned memory_n = 0;
    std::uint64_t seed = 0;
    std::uint64_t iteration = 0;
    std::string measurement;
    double value = 0.0;
};

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
    double stderr_mean = 0.0;
    std::size_t count = 0;
};

// Everything one experiment produced: the raw rows, per-group aggregates
// (recomputable from the rows), the config echo and the master seed.
struct ExperimentReport {
    nlohmann::json config_echo;
    std::uint64_t seed = 0;
    std::vector<MeasurementRow> rows;
    std::map<std::string, Aggregate> aggregates;
    std::size_t timeout_count = 0;
    std::size_t iteration_count = 0;
};

Aggregate aggregate_values(const std::vector<double>& values);

// Deterministic text encodings: same report -> byte-identical output,
// regardless of how many workers produced it.
void write_csv(const ExperimentReport& report, std::ostream& out);
void write_json(const ExperimentReport& report, std::ostream& out);

std::string format_value(double v);

} // namespace forestwalk

#endif // FORESTWALK_REPORT_HPP
