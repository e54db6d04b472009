#include "forestwalk/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace forestwalk {

Aggregate aggregate_values(const std::vector<double>& values) {
    Aggregate agg;
    agg.count = values.size();
    if (values.empty()) return agg;
    double sum = 0.0;
    for (double v : values) sum += v;
    agg.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
        agg.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
        agg.stderr_mean = agg.stddev / std::sqrt(static_cast<double>(values.size()));
    }
    return agg;
}

std::string format_value(double v) {
    // %.12g keeps integral step counts printing as integers while carrying
    // enough digits for derived means; snprintf formatting is locale-free
    // here (the CLI never touches the global locale) and stable across runs.
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_csv(const ExperimentReport& report, std::ostream& out) {
    out << "scenario,policy,memory_n,seed,iteration,measurement,value\n";
    for (const MeasurementRow& row : report.rows) {
        out << row.scenario << ',' << row.policy << ',' << row.memory_n << ',' << row.seed << ','
            << row.iteration << ',' << row.measurement << ',' << format_value(row.value) << '\n';
    }
}

void write_json(const ExperimentReport& report, std::ostream& out) {
    nlohmann::json doc;
    doc["config"] = report.config_echo;
    doc["seed"] = report.seed;
    doc["iterations"] = report.iteration_count;
    doc["timeouts"] = report.timeout_count;
    doc["rows"] = nlohmann::json::array();
    for (const MeasurementRow& row : report.rows) {
        doc["rows"].push_back({{"scenario", row.scenario},
                               {"policy", row.policy},
                               {"memory_n", row.memory_n},
                               {"seed", row.seed},
                               {"iteration", row.iteration},
                               {"measurement", row.measurement},
                               {"value", row.value}});
    }
    doc["aggregates"] = nlohmann::json::object();
    for (const auto& [key, agg] : report.aggregates) {
        doc["aggregates"][key] = {{"mean", agg.mean},
                                  {"stddev", agg.stddev},
                                  {"stderr", agg.stderr_mean},
                                  {"count", agg.count}};
    }
    out << doc.dump(2) << '\n';
}

} // namespace forestwalk
