#include "forestwalk/snapshot.hpp"

#include <fstream>

namespace forestwalk {

namespace {

std::string state_code(VertexState s) { return to_string(s); }

VertexState parse_state(const std::string& code) {
    if (code == "T") return VertexState::Token;
    if (code == "N") return VertexState::Plain;
    throw ConfigError("unknown vertex state \"" + code + "\" (want \"T\" or \"N\")");
}

EndpointLabel parse_label(const std::string& code) {
    if (code == "0") return EndpointLabel::Null;
    if (code == "1") return EndpointLabel::TowardToken;
    if (code == "2") return EndpointLabel::TowardChild;
    throw ConfigError("unknown endpoint label \"" + code + "\" (want \"0\", \"1\" or \"2\")");
}

} // namespace

nlohmann::json snapshot_to_json(const LabelledGraph& graph) {
    nlohmann::json doc;
    doc["vertices"] = nlohmann::json::array();
    doc["edges"] = nlohmann::json::array();
    for (VertexId v : graph.vertex_ids()) {
        doc["vertices"].push_back({{"id", v}, {"state", state_code(graph.state_of(v))}});
    }
    for (const EdgeKey& e : graph.edge_keys()) {
        doc["edges"].push_back({{"u", e.a},
                                {"v", e.b},
                                {"label_u", to_string(graph.label_at(e.a, e.b))},
                                {"label_v", to_string(graph.label_at(e.b, e.a))}});
    }
    return doc;
}

LabelledGraph snapshot_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges")) {
        throw ConfigError("snapshot must be an object with \"vertices\" and \"edges\"");
    }
    LabelledGraph graph;
    try {
        for (const auto& entry : doc.at("vertices")) {
            graph.add_vertex_with_id(entry.at("id").get<VertexId>(),
                                     parse_state(entry.at("state").get<std::string>()));
        }
        for (const auto& entry : doc.at("edges")) {
            const VertexId u = entry.at("u").get<VertexId>();
            const VertexId v = entry.at("v").get<VertexId>();
            graph.add_edge(u, v);
            graph.set_edge_labels(u, v, parse_label(entry.at("label_u").get<std::string>()),
                                  parse_label(entry.at("label_v").get<std::string>()));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed snapshot: ") + e.what());
    } catch (const GraphError& e) {
        throw ConfigError(std::string("malformed snapshot: ") + e.what());
    }
    // Note: an illegal label pair (e.g. "1"/"1") raises CorruptionError and is
    // deliberately not remapped — the file parsed fine, the *state* is invalid.
    return graph;
}

void save_snapshot(const LabelledGraph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot open " + path + " for writing");
    }
    out << snapshot_to_json(graph).dump(2) << '\n';
}

LabelledGraph load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return snapshot_from_json(doc);
}

} // namespace forestwalk
