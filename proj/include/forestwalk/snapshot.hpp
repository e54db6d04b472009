#ifndef FORESTWALK_SNAPSHOT_HPP
#define FORESTWALK_SNAPSHOT_HPP

#include <string>

#include <json.hpp>

#include "forestwalk/graph.hpp"

namespace forestwalk {

// Graph snapshots travel as JSON:
//   {"vertices": [{"id": 3, "state": "T"}, ...],
//    "edges": [{"u": 3, "v": 7, "label_u": "0", "label_v": "0"}, ...]}
// Vertex states use the protocol letters T/N; endpoint labels use
// "0" (null), "1" (toward token), "2" (toward child).

nlohmann::json snapshot_to_json(const LabelledGraph& graph);

// Throws ConfigError on malformed documents (unknown labels, dangling
// endpoints, duplicates). Structural validity of the labelling itself is
// *not* checked here; run forest() on the result to validate.
LabelledGraph snapshot_from_json(const nlohmann::json& doc);

void save_snapshot(const LabelledGraph& graph, const std::string& path);
LabelledGraph load_snapshot(const std::string& path);

} // namespace forestwalk

#endif // FORESTWALK_SNAPSHOT_HPP
