#include "forestwalk/graph.hpp"

#include <algorithm>
#include <deque>

namespace forestwalk {

namespace {

std::string vertex_name(VertexId v) { return std::to_string(v); }

std::string edge_name(VertexId u, VertexId v) {
    return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

bool legal_label_pair(EndpointLabel x, EndpointLabel y) {
    if (x == EndpointLabel::Null && y == EndpointLabel::Null) return true;
    if (x == EndpointLabel::TowardToken && y == EndpointLabel::TowardChild) return true;
    if (x == EndpointLabel::TowardChild && y == EndpointLabel::TowardToken) return true;
    return false;
}

} // namespace

const char* to_string(VertexState s) {
    return s == VertexState::Token ? "T" : "N";
}

const char* to_string(EndpointLabel l) {
    switch (l) {
    case EndpointLabel::Null: return "0";
    case EndpointLabel::TowardToken: return "1";
    case EndpointLabel::TowardChild: return "2";
    }
    return "?";
}

void LabelledGraph::note_read(VertexId v) const {
    if (trace_) trace_->reads.insert(v);
}

void LabelledGraph::note_write(VertexId v) const {
    if (trace_) trace_->writes.insert(v);
}

const LabelledGraph::VertexRecord& LabelledGraph::vertex_record(VertexId v) const {
    auto it = verts_.find(v);
    if (it == verts_.end()) {
        throw GraphError(GraphError::Code::MissingVertex, "no such vertex " + vertex_name(v));
    }
    return it->second;
}

LabelledGraph::VertexRecord& LabelledGraph::vertex_record(VertexId v) {
    auto it = verts_.find(v);
    if (it == verts_.end()) {
        throw GraphError(GraphError::Code::MissingVertex, "no such vertex " + vertex_name(v));
    }
    return it->second;
}

VertexId LabelledGraph::add_vertex() {
    const VertexId id = next_id_++;
    verts_.emplace(id, VertexRecord{});
    note_write(id);
    return id;
}

VertexId LabelledGraph::add_vertex_with_id(VertexId id, VertexState state) {
    if (verts_.count(id)) {
        throw GraphError(GraphError::Code::DuplicateVertex, "vertex " + vertex_name(id) + " already exists");
    }
    VertexRecord rec;
    rec.state = state;
    verts_.emplace(id, rec);
    if (id >= next_id_) next_id_ = id + 1; // ids are never reused
    note_write(id);
    return id;
}

void LabelledGraph::remove_vertex(VertexId v) {
    const VertexRecord& rec = vertex_record(v);
    if (!rec.adjacent.empty()) {
        throw GraphError(GraphError::Code::VertexNotIsolated,
                         "vertex " + vertex_name(v) + " still has incident edges");
    }
    note_write(v);
    verts_.erase(v);
}

VertexState LabelledGraph::state_of(VertexId v) const {
    note_read(v);
    return vertex_record(v).state;
}

void LabelledGraph::set_vertex_state(VertexId v, VertexState s) {
    note_write(v);
    vertex_record(v).state = s;
}

const std::set<VertexId>& LabelledGraph::neighbors(VertexId v) const {
    note_read(v);
    return vertex_record(v).adjacent;
}

std::vector<VertexId> LabelledGraph::vertex_ids() const {
    std::vector<VertexId> out;
    out.reserve(verts_.size());
    for (const auto& [id, rec] : verts_) out.push_back(id);
    return out;
}

EdgeKey LabelledGraph::add_edge(VertexId u, VertexId v) {
    if (u == v) {
        throw GraphError(GraphError::Code::SelfLoop, "self-loop at " + vertex_name(u));
    }
    if (!verts_.count(u) || !verts_.count(v)) {
        throw GraphError(GraphError::Code::DeadEndpoint, "edge " + edge_name(u, v) + " has a dead endpoint");
    }
    EdgeKey key(u, v);
    if (edges_.count(key)) {
        throw GraphError(GraphError::Code::DuplicateEdge, "edge " + edge_name(u, v) + " already exists");
    }
    edges_.emplace(key, EdgeLabels{});
    verts_[u].adjacent.insert(v);
    verts_[v].adjacent.insert(u);
    note_write(u);
    note_write(v);
    return key;
}

RemovalNotice LabelledGraph::remove_edge(VertexId u, VertexId v) {
    EdgeKey key(u, v);
    auto it = edges_.find(key);
    if (it == edges_.end()) {
        throw GraphError(GraphError::Code::MissingEdge, "no such edge " + edge_name(u, v));
    }
    RemovalNotice notice;
    notice.u = u;
    notice.v = v;
    notice.label_u = (key.a == u) ? it->second.at_a : it->second.at_b;
    notice.label_v = (key.a == u) ? it->second.at_b : it->second.at_a;
    edges_.erase(it);
    verts_[u].adjacent.erase(v);
    verts_[v].adjacent.erase(u);
    note_write(u);
    note_write(v);
    return notice;
}

bool LabelledGraph::has_edge(VertexId u, VertexId v) const {
    if (u == v) return false;
    return edges_.count(EdgeKey(u, v)) != 0;
}

EndpointLabel LabelledGraph::label_at(VertexId endpoint, VertexId other) const {
    EdgeKey key(endpoint, other);
    auto it = edges_.find(key);
    if (it == edges_.end()) {
        throw GraphError(GraphError::Code::MissingEdge, "no such edge " + edge_name(endpoint, other));
    }
    note_read(endpoint);
    note_read(other);
    return (key.a == endpoint) ? it->second.at_a : it->second.at_b;
}

void LabelledGraph::set_edge_labels(VertexId u, VertexId v, EndpointLabel label_u, EndpointLabel label_v) {
    EdgeKey key(u, v);
    auto it = edges_.find(key);
    if (it == edges_.end()) {
        throw GraphError(GraphError::Code::MissingEdge, "no such edge " + edge_name(u, v));
    }
    if (!legal_label_pair(label_u, label_v)) {
        throw CorruptionError("illegal label pair " + std::string(to_string(label_u)) + "/" +
                              to_string(label_v) + " on edge " + edge_name(u, v));
    }
    if (key.a == u) {
        it->second.at_a = label_u;
        it->second.at_b = label_v;
    } else {
        it->second.at_a = label_v;
        it->second.at_b = label_u;
    }
    note_write(u);
    note_write(v);
}

std::vector<EdgeKey> LabelledGraph::edge_keys() const {
    std::vector<EdgeKey> out;
    out.reserve(edges_.size());
    for (const auto& [key, labels] : edges_) out.push_back(key);
    return out;
}

std::vector<VertexId> LabelledGraph::tree_neighbors(VertexId v) const {
    note_read(v);
    std::vector<VertexId> out;
    for (VertexId w : vertex_record(v).adjacent) {
        if (label_at(v, w) != EndpointLabel::Null) out.push_back(w);
    }
    return out;
}

std::size_t LabelledGraph::tree_degree(VertexId v) const {
    return tree_neighbors(v).size();
}

std::vector<TreeView> forest(const LabelledGraph& graph) {
    std::vector<TreeView> views;
    std::set<VertexId> seen;

    for (VertexId root : graph.vertex_ids()) {
        if (seen.count(root)) continue;

        // Flood across tree edges only.
        TreeView view;
        std::deque<VertexId> frontier{root};
        seen.insert(root);
        view.vertices.insert(root);
        while (!frontier.empty()) {
            VertexId v = frontier.front();
            frontier.pop_front();
            for (VertexId w : graph.tree_neighbors(v)) {
                view.tree_edges.insert(EdgeKey(v, w));
                if (!seen.count(w)) {
                    seen.insert(w);
                    view.vertices.insert(w);
                    frontier.push_back(w);
                }
            }
        }

        // Connected by construction; acyclic iff |E| = |V| - 1.
        if (view.tree_edges.size() != view.vertices.size() - 1) {
            throw CorruptionError("tree edges form a cycle in component of vertex " +
                                  std::to_string(root));
        }

        std::size_t tokens = 0;
        for (VertexId v : view.vertices) {
            view.degree[v] = graph.tree_degree(v);
            std::size_t toward_token = 0;
            for (VertexId w : graph.tree_neighbors(v)) {
                if (graph.label_at(v, w) == EndpointLabel::TowardToken) ++toward_token;
            }
            if (graph.state_of(v) == VertexState::Token) {
                ++tokens;
                view.token_holder = v;
                if (toward_token != 0) {
                    throw CorruptionError("token holder " + std::to_string(v) +
                                          " has a TowardToken endpoint");
                }
            } else if (toward_token != 1) {
                throw CorruptionError("plain vertex " + std::to_string(v) + " has " +
                                      std::to_string(toward_token) +
                                      " TowardToken endpoints (want exactly 1)");
            }
        }
        if (tokens != 1) {
            throw CorruptionError("component of vertex " + std::to_string(root) + " holds " +
                                  std::to_string(tokens) + " tokens (want exactly 1)");
        }

        // Every non-token vertex must reach the holder by following its
        // unique TowardToken endpoint, in at most |tree| - 1 hops.
        for (VertexId v : view.vertices) {
            VertexId cur = v;
            std::size_t hops = 0;
            while (cur != view.token_holder) {
                if (++hops >= view.vertices.size()) {
                    throw CorruptionError("TowardToken chain from vertex " + std::to_string(v) +
                                          " does not reach the token");
                }
                VertexId next = cur;
                for (VertexId w : graph.tree_neighbors(cur)) {
                    if (graph.label_at(cur, w) == EndpointLabel::TowardToken) {
                        next = w;
                        break;
                    }
                }
                if (next == cur) {
                    throw CorruptionError("vertex " + std::to_string(cur) +
                                          " has no TowardToken endpoint on its path");
                }
                cur = next;
            }
        }

        views.push_back(std::move(view));
    }
    return views;
}

TreeView tree_of(const LabelledGraph& graph, VertexId v) {
    for (TreeView& view : forest(graph)) {
        if (view.vertices.count(v)) return view;
    }
    throw GraphError(GraphError::Code::MissingVertex, "no such vertex " + std::to_string(v));
}

} // namespace forestwalk
