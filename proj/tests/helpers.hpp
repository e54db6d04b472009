#ifndef FORESTWALK_TEST_HELPERS_HPP
#define FORESTWALK_TEST_HELPERS_HPP

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "forestwalk/graph.hpp"

namespace forestwalk::testing {

// Path v0-v1-...-v{n-1} with the token at index token_index; labels oriented
// so every TowardToken endpoint faces the token holder.
inline std::vector<VertexId> build_path_tree(LabelledGraph& g, std::size_t n,
                                             std::size_t token_index) {
    std::vector<VertexId> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(g.add_vertex());
    for (std::size_t i = 0; i < n; ++i) {
        g.set_vertex_state(ids[i], i == token_index ? VertexState::Token : VertexState::Plain);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        g.add_edge(ids[i], ids[i + 1]);
        if (i + 1 <= token_index) {
            // token lies to the right: left endpoint points toward it
            g.set_edge_labels(ids[i], ids[i + 1], EndpointLabel::TowardToken,
                              EndpointLabel::TowardChild);
        } else {
            g.set_edge_labels(ids[i], ids[i + 1], EndpointLabel::TowardChild,
                              EndpointLabel::TowardToken);
        }
    }
    return ids;
}

// Star with `leaves` leaves; returns {center, leaf...}; token at the center.
inline std::vector<VertexId> build_star_tree(LabelledGraph& g, std::size_t leaves) {
    std::vector<VertexId> ids;
    ids.push_back(g.add_vertex()); // center keeps its initial Token state
    for (std::size_t i = 0; i < leaves; ++i) {
        VertexId leaf = g.add_vertex();
        g.set_vertex_state(leaf, VertexState::Plain);
        g.add_edge(ids[0], leaf);
        g.set_edge_labels(ids[0], leaf, EndpointLabel::TowardChild, EndpointLabel::TowardToken);
        ids.push_back(leaf);
    }
    return ids;
}

// Two 2-vertex trees {0-1} and {2-3} plus the bridge 0-2. Tokens sit on the
// bridge endpoints when tokens_on_bridge, else on vertices 1 and 3.
inline LabelledGraph two_by_two(bool tokens_on_bridge) {
    LabelledGraph g;
    for (int i = 0; i < 4; ++i) g.add_vertex();
    const auto tree = [&](VertexId token, VertexId plain) {
        g.set_vertex_state(token, VertexState::Token);
        g.set_vertex_state(plain, VertexState::Plain);
        g.add_edge(token, plain);
        g.set_edge_labels(token, plain, EndpointLabel::TowardChild, EndpointLabel::TowardToken);
    };
    if (tokens_on_bridge) {
        tree(0, 1);
        tree(2, 3);
    } else {
        tree(1, 0);
        tree(3, 2);
    }
    g.add_edge(0, 2);
    return g;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace forestwalk::testing

#endif // FORESTWALK_TEST_HELPERS_HPP
