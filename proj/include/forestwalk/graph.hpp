#ifndef FORESTWALK_GRAPH_HPP
#define FORESTWALK_GRAPH_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "forestwalk/errors.hpp"

namespace forestwalk {

using VertexId = std::uint32_t;

enum class VertexState { Token, Plain };

// Per-endpoint edge labels. Every edge carries one label per endpoint;
// the only combinations a valid protocol state can hold are Null/Null
// (non-tree edge) and TowardToken/TowardChild (tree edge, child side first).
enum class EndpointLabel { Null, TowardToken, TowardChild };

// Canonical unordered edge key: first <= second.
struct EdgeKey {
    VertexId a;
    VertexId b;

    EdgeKey(VertexId u, VertexId v) : a(u < v ? u : v), b(u < v ? v : u) {}

    bool operator<(const EdgeKey& o) const {
        return a != o.a ? a < o.a : b < o.b;
    }
    bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
};

// What remove_edge hands back: the two endpoint labels at removal time,
// so the protocol layer can run the r1/r2 reactions.
struct RemovalNotice {
    VertexId u;
    VertexId v;
    EndpointLabel label_u;
    EndpointLabel label_v;
};

// Timed topology mutation consumed by the simulator.
struct TopologyEvent {
    enum class Kind { EdgeUp, EdgeDown, VertexUp, VertexDown };

    std::uint64_t at_step = 0;
    Kind kind = Kind::EdgeUp;
    VertexId u = 0;
    VertexId v = 0; // unused for vertex events
};

// Derived, validated view of one tree of the forest.
struct TreeView {
    std::set<VertexId> vertices;
    std::set<EdgeKey> tree_edges;
    VertexId token_holder = 0;
    std::map<VertexId, std::size_t> degree; // tree-degree per vertex

    std::size_t order() const { return vertices.size(); }
};

// Optional read/write tracing used by the rule-locality tests. The protocol
// rules must never look beyond a token vertex's neighborhood; tests install
// a trace, run one rule, and inspect which vertices were touched.
struct AccessTrace {
    std::set<VertexId> reads;
    std::set<VertexId> writes;

    void clear() {
        reads.clear();
        writes.clear();
    }
};

// Dynamic undirected simple graph with per-vertex state and per-endpoint
// labels. The labelling is the single source of truth for the forest; all
// tree structure is derived from it on demand (see forest()).
class LabelledGraph {
public:
    LabelledGraph() = default;

    // --- vertex operations -------------------------------------------------

    // New vertex, fresh id, state Token (a one-vertex tree owning its token).
    VertexId add_vertex();

    // Snapshot loading and hand-built fixtures need explicit ids.
    VertexId add_vertex_with_id(VertexId id, VertexState state);

    // Only isolated vertices may be deleted; the simulator removes incident
    // edges (with protocol reactions) before calling this.
    void remove_vertex(VertexId v);

    bool has_vertex(VertexId v) const { return verts_.count(v) != 0; }
    std::size_t vertex_count() const { return verts_.size(); }

    VertexState state_of(VertexId v) const;
    void set_vertex_state(VertexId v, VertexState s);

    const std::set<VertexId>& neighbors(VertexId v) const;

    // Vertex ids in ascending order (stable iteration for reproducibility).
    std::vector<VertexId> vertex_ids() const;

    // --- edge operations ---------------------------------------------------

    // New edge, both endpoints labelled Null. Merging only ever happens via
    // rule r3, never as a side effect of topology.
    EdgeKey add_edge(VertexId u, VertexId v);

    RemovalNotice remove_edge(VertexId u, VertexId v);

    bool has_edge(VertexId u, VertexId v) const;
    std::size_t edge_count() const { return edges_.size(); }

    EndpointLabel label_at(VertexId endpoint, VertexId other) const;

    // Atomic relabel of both endpoints. Rejects any combination other than
    // Null/Null and TowardToken/TowardChild: those are the only states
    // reachable by the protocol, and enforcing that here turns protocol bugs
    // into loud errors instead of silent corruption.
    void set_edge_labels(VertexId u, VertexId v, EndpointLabel label_u, EndpointLabel label_v);

    std::vector<EdgeKey> edge_keys() const;

    // Neighbors of v across tree edges only (what circulation may use).
    std::vector<VertexId> tree_neighbors(VertexId v) const;
    std::size_t tree_degree(VertexId v) const;

    // --- tracing -----------------------------------------------------------

    void set_trace(AccessTrace* trace) { trace_ = trace; }

private:
    struct VertexRecord {
        VertexState state = VertexState::Token;
        std::set<VertexId> adjacent;
    };

    struct EdgeLabels {
        EndpointLabel at_a = EndpointLabel::Null; // label at EdgeKey::a
        EndpointLabel at_b = EndpointLabel::Null; // label at EdgeKey::b
    };

    const VertexRecord& vertex_record(VertexId v) const;
    VertexRecord& vertex_record(VertexId v);
    void note_read(VertexId v) const;
    void note_write(VertexId v) const;

    std::map<VertexId, VertexRecord> verts_;
    std::map<EdgeKey, EdgeLabels> edges_;
    VertexId next_id_ = 0;
    AccessTrace* trace_ = nullptr;
};

// Partition the live vertices into validated TreeViews. Throws
// CorruptionError when the labelling violates the oriented-forest
// invariants; that always indicates a protocol bug (or a corrupt snapshot).
std::vector<TreeView> forest(const LabelledGraph& graph);

// Find the TreeView containing v. Convenience over forest().
TreeView tree_of(const LabelledGraph& graph, VertexId v);

const char* to_string(VertexState s);
const char* to_string(EndpointLabel l);

} // namespace forestwalk

#endif // FORESTWALK_GRAPH_HPP
