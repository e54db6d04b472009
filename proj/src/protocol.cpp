#include "forestwalk/protocol.hpp"

#include <algorithm>

namespace forestwalk {

const char* to_string(RuleId r) {
    switch (r) {
    case RuleId::R1: return "r1";
    case RuleId::R2: return "r2";
    case RuleId::R3: return "r3";
    case RuleId::R4: return "r4";
    }
    return "?";
}

std::vector<RuleId> react_edge_down(LabelledGraph& graph, const RemovalNotice& notice,
                                    MemoryTable& memory) {
    memory.purge_edge(notice.u, notice.v);

    std::vector<RuleId> applied;
    // r1: a vertex whose edge toward its token broke regenerates a token.
    // A Token vertex can never lose a TowardToken endpoint (it has none);
    // seeing one means the state was already corrupt.
    for (auto [vertex, label] : {std::pair{notice.u, notice.label_u}, {notice.v, notice.label_v}}) {
        if (label == EndpointLabel::TowardToken) {
            if (graph.state_of(vertex) == VertexState::Token) {
                throw CorruptionError("token holder " + std::to_string(vertex) +
                                      " lost a TowardToken endpoint");
            }
            graph.set_vertex_state(vertex, VertexState::Token);
            applied.push_back(RuleId::R1);
        }
    }
    // r2: the parent side just forgets the edge; the removal itself already
    // erased all local state, so there is nothing left to do but report it.
    for (auto label : {notice.label_u, notice.label_v}) {
        if (label == EndpointLabel::TowardChild) {
            applied.push_back(RuleId::R2);
        }
    }
    return applied;
}

std::optional<VertexId> try_merge(LabelledGraph& graph, VertexId token_vertex, Rng& rng) {
    if (graph.state_of(token_vertex) != VertexState::Token) {
        throw ContractViolation("try_merge called on a Plain vertex " +
                                std::to_string(token_vertex));
    }
    std::vector<VertexId> candidates;
    for (VertexId w : graph.neighbors(token_vertex)) {
        if (graph.label_at(token_vertex, w) == EndpointLabel::Null &&
            graph.state_of(w) == VertexState::Token) {
            candidates.push_back(w);
        }
    }
    if (candidates.empty()) return std::nullopt;

    // Several Token neighbors may be reachable; exactly one merge happens
    // per application, the other opportunities wait (or are missed).
    const VertexId w = candidates[rng.uniform_index(candidates.size())];
    graph.set_vertex_state(w, VertexState::Plain);
    graph.set_edge_labels(token_vertex, w, EndpointLabel::TowardChild, EndpointLabel::TowardToken);
    return w;
}

namespace {

VertexId pick_circulation_target(const LabelledGraph& graph, VertexId u,
                                 const std::vector<VertexId>& targets, const WalkPolicy& policy,
                                 const MemoryTable& memory, Rng& rng) {
    (void)graph;
    if (!policy.is_biased()) {
        return targets[rng.uniform_index(targets.size())];
    }

    // Memory(n): exclude the n most recently used incident tree edges,
    // pick uniformly among the rest; when nothing remains (tree-degree <= n)
    // fall back to the least recently visited edge. In the fallback every
    // incident tree edge carries a stamp (an unstamped edge would have been
    // allowed), and stamps are globally unique, so the minimum is unique.
    std::vector<std::pair<std::uint64_t, VertexId>> stamped;
    std::vector<VertexId> unstamped;
    for (VertexId w : targets) {
        if (auto stamp = memory.stamp_of(u, w)) {
            stamped.emplace_back(*stamp, w);
        } else {
            unstamped.push_back(w);
        }
    }
    std::sort(stamped.begin(), stamped.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });

    std::vector<VertexId> allowed = unstamped;
    for (std::size_t i = policy.memory_n; i < stamped.size(); ++i) {
        allowed.push_back(stamped[i].second);
    }
    if (!allowed.empty()) {
        std::sort(allowed.begin(), allowed.end());
        return allowed[rng.uniform_index(allowed.size())];
    }
    return stamped.back().second;
}

} // namespace

std::optional<VertexId> circulate(LabelledGraph& graph, VertexId token_vertex,
                                  const WalkPolicy& policy, MemoryTable& memory, Rng& rng) {
    if (graph.state_of(token_vertex) != VertexState::Token) {
        throw ContractViolation("circulate called on a Plain vertex " +
                                std::to_string(token_vertex));
    }
    const std::vector<VertexId> targets = graph.tree_neighbors(token_vertex);
    if (targets.empty()) return std::nullopt;

    const VertexId w =
        pick_circulation_target(graph, token_vertex, targets, policy, memory, rng);

    graph.set_vertex_state(token_vertex, VertexState::Plain);
    graph.set_vertex_state(w, VertexState::Token);
    graph.set_edge_labels(token_vertex, w, EndpointLabel::TowardToken, EndpointLabel::TowardChild);
    memory.record_traversal(token_vertex, w);
    return w;
}

StepOutcome step_token(LabelledGraph& graph, VertexId token_vertex, const WalkPolicy& policy,
                       MemoryTable& memory, Rng& rng) {
    // r4 cannot apply while r3 is applicable: merging always wins.
    if (auto merged_with = try_merge(graph, token_vertex, rng)) {
        return StepOutcome::merged(*merged_with);
    }
    if (auto moved_to = circulate(graph, token_vertex, policy, memory, rng)) {
        return StepOutcome::moved(*moved_to);
    }
    return StepOutcome::stalled();
}

} // namespace forestwalk
