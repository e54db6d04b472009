#include "forestwalk/analysis.hpp"

#include <cmath>
#include <limits>

namespace forestwalk {

BridgeSet bridges(const LabelledGraph& graph, const TreeView& t1, const TreeView& t2) {
    if (t1.vertices == t2.vertices) {
        throw ContractViolation("bridges: the two trees must be distinct");
    }
    BridgeSet out;
    for (const EdgeKey& e : graph.edge_keys()) {
        VertexId in1, in2;
        if (t1.vertices.count(e.a) && t2.vertices.count(e.b)) {
            in1 = e.a;
            in2 = e.b;
        } else if (t1.vertices.count(e.b) && t2.vertices.count(e.a)) {
            in1 = e.b;
            in2 = e.a;
        } else {
            continue;
        }
        // A cross edge between two trees is necessarily a non-tree edge.
        if (graph.label_at(in1, in2) != EndpointLabel::Null) {
            throw CorruptionError("tree edge crosses two trees");
        }
        out.pairs.push_back({in1, in2, t1.degree.at(in1), t2.degree.at(in2)});
    }
    return out;
}

Distribution stationary_distribution(const TreeView& t) {
    if (t.order() < 2) {
        throw ContractViolation("stationary_distribution undefined on a single-vertex tree");
    }
    const double denom = 2.0 * static_cast<double>(t.tree_edges.size());
    Distribution dist;
    for (VertexId v : t.vertices) {
        dist.probs[v] = static_cast<double>(t.degree.at(v)) / denom;
    }
    return dist;
}

double merge_probability(const TreeView& t1, const TreeView& t2, const BridgeSet& b) {
    if (b.empty()) return 0.0;
    if (t1.order() < 2 || t2.order() < 2) {
        throw ContractViolation("merge_probability needs both trees of order >= 2");
    }
    const double denom1 = 2.0 * static_cast<double>(t1.tree_edges.size());
    const double denom2 = 2.0 * static_cast<double>(t2.tree_edges.size());
    double total = 0.0;
    for (const BridgePair& pair : b.pairs) {
        total += (static_cast<double>(pair.degree_u) / denom1) *
                 (static_cast<double>(pair.degree_v) / denom2);
    }
    return total;
}

double expected_merging_time(const TreeView& t1, const TreeView& t2, const BridgeSet& b) {
    const double p = merge_probability(t1, t2, b);
    if (p == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / p;
}

double avg_degree_expected_merging_time(std::size_t order1, std::size_t order2,
                                        std::size_t bridge_count) {
    if (order1 < 2 || order2 < 2) {
        throw ContractViolation("avg_degree_expected_merging_time needs orders >= 2");
    }
    if (bridge_count < 1) {
        throw ContractViolation("avg_degree_expected_merging_time needs >= 1 bridge");
    }
    // With av.deg = 2|E|/|V| at all four slots, each bridge contributes
    // (av.deg/2|E|)^2-style terms that collapse to 1/(|V1||V2|).
    return static_cast<double>(order1) * static_cast<double>(order2) /
           static_cast<double>(bridge_count);
}

Distribution empirical_distribution(const std::map<VertexId, std::uint64_t>& occupancy) {
    std::uint64_t total = 0;
    for (const auto& [v, count] : occupancy) total += count;
    if (total == 0) {
        throw ContractViolation("empirical_distribution: zero total count");
    }
    Distribution dist;
    for (const auto& [v, count] : occupancy) {
        dist.probs[v] = static_cast<double>(count) / static_cast<double>(total);
    }
    return dist;
}

double distribution_distance(const Distribution& p, const Distribution& q) {
    if (p.probs.size() != q.probs.size()) {
        throw ContractViolation("distribution_distance: supports differ");
    }
    double sum = 0.0;
    auto it_q = q.probs.begin();
    for (const auto& [v, prob] : p.probs) {
        if (it_q->first != v) {
            throw ContractViolation("distribution_distance: supports differ");
        }
        sum += std::abs(prob - it_q->second);
        ++it_q;
    }
    return 100.0 * 0.5 * sum;
}

} // namespace forestwalk
