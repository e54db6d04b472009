#ifndef FORESTWALK_PROTOCOL_HPP
#define FORESTWALK_PROTOCOL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "forestwalk/graph.hpp"
#include "forestwalk/rng.hpp"

namespace forestwalk {

// Token-circulation strategy. Memory(0) is behaviourally identical to
// Uniform (the unbiased walk).
struct WalkPolicy {
    enum class Kind { Uniform, Memory };

    Kind kind = Kind::Uniform;
    unsigned memory_n = 0;

    static WalkPolicy uniform() { return WalkPolicy{Kind::Uniform, 0}; }
    static WalkPolicy memory(unsigned n) { return WalkPolicy{Kind::Memory, n}; }

    bool is_biased() const { return kind == Kind::Memory && memory_n > 0; }
};

// The four relabelling rules, in priority order (r1 highest).
enum class RuleId { R1, R2, R3, R4 };

const char* to_string(RuleId r);

// Per-vertex memory of recently used incident tree edges. One global
// traversal clock stamps each (vertex, edge) use; the "n most recent" set
// and the least-recently-visited fallback both read off the stamps, and the
// stamps also provide the full last-visit ordering the fallback needs.
//
// A traversal u->w is recorded at *both* endpoints: u used the edge to send
// the token (departure), w saw it arrive. The arrival stamp is the newer of
// the two, so with n = 1 the receiving vertex will not bounce the token
// straight back while it still has somewhere else to send it.
class MemoryTable {
public:
    void record_traversal(VertexId u, VertexId w) {
        stamps_[u][w] = ++clock_;
        stamps_[w][u] = ++clock_;
    }

    std::optional<std::uint64_t> stamp_of(VertexId v, VertexId w) const {
        auto row = stamps_.find(v);
        if (row == stamps_.end()) return std::nullopt;
        auto cell = row->second.find(w);
        if (cell == row->second.end()) return std::nullopt;
        return cell->second;
    }

    // Entries must reference live tree edges only; the protocol purges them
    // the moment the underlying edge disappears.
    void purge_edge(VertexId u, VertexId v) {
        auto row = stamps_.find(u);
        if (row != stamps_.end()) row->second.erase(v);
        row = stamps_.find(v);
        if (row != stamps_.end()) row->second.erase(u);
    }

    void purge_vertex(VertexId v) { stamps_.erase(v); }

    void clear() {
        stamps_.clear();
        clock_ = 0;
    }

private:
    std::map<VertexId, std::map<VertexId, std::uint64_t>> stamps_;
    std::uint64_t clock_ = 0;
};

// Outcome of one token step: merged with another token (r3), moved along a
// tree edge (r4), or stalled (isolated vertex, nothing applicable).
struct StepOutcome {
    enum class Kind { Merged, Moved, Stalled };

    Kind kind = Kind::Stalled;
    VertexId other = 0; // merge partner or move target

    static StepOutcome merged(VertexId with) { return {Kind::Merged, with}; }
    static StepOutcome moved(VertexId to) { return {Kind::Moved, to}; }
    static StepOutcome stalled() { return {Kind::Stalled, 0}; }
};

// Topology reaction to a removed edge (rules r1/r2). Must be called with the
// notice remove_edge returned, before any further token activity. Returns
// the rules applied, highest priority first. Also purges vertex memories.
std::vector<RuleId> react_edge_down(LabelledGraph& graph, const RemovalNotice& notice,
                                    MemoryTable& memory);

// Rule r3: if the token at token_vertex has Token neighbors across Null/Null
// edges, merge with one of them (chosen uniformly) and return it. The chosen
// neighbor turns Plain and the shared edge becomes a tree edge rooted at
// token_vertex. Returns nullopt when no merge is possible.
std::optional<VertexId> try_merge(LabelledGraph& graph, VertexId token_vertex, Rng& rng);

// Rule r4: move the token along one incident tree edge chosen per policy.
// Returns the new token vertex, or nullopt for a tree-degree-0 vertex (the
// token stays put; this is a distinct signal, not an error).
std::optional<VertexId> circulate(LabelledGraph& graph, VertexId token_vertex,
                                  const WalkPolicy& policy, MemoryTable& memory, Rng& rng);

// One protocol step for one token, honouring rule priority: r3 before r4.
StepOutcome step_token(LabelledGraph& graph, VertexId token_vertex, const WalkPolicy& policy,
                       MemoryTable& memory, Rng& rng);

} // namespace forestwalk

#endif // FORESTWALK_PROTOCOL_HPP
