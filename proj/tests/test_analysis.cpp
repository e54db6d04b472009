#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "forestwalk/analysis.hpp"
#include "forestwalk/sim.hpp"
#include "helpers.hpp"

using namespace forestwalk;
using forestwalk::testing::build_path_tree;
using forestwalk::testing::build_star_tree;
using forestwalk::testing::two_by_two;

namespace {

// The running two-tree example: a 6-vertex tree (token at 2) and a 6-vertex
// tree (token at 7), joined by four bridges (3,6), (4,8), (2,8), (5,11).
//
//   0 - 1 - 2 - 4 - 5        6 - 7 - 9,10   8 - 7   8 - 11
//           |
//           3
LabelledGraph two_tree_example() {
    LabelledGraph g;
    for (VertexId v = 0; v <= 11; ++v) {
        g.add_vertex_with_id(v, (v == 2 || v == 7) ? VertexState::Token : VertexState::Plain);
    }
    const auto tree_edge = [&](VertexId toward_token_side, VertexId toward_child_side) {
        g.add_edge(toward_token_side, toward_child_side);
        g.set_edge_labels(toward_token_side, toward_child_side, EndpointLabel::TowardToken,
                          EndpointLabel::TowardChild);
    };
    // first tree, token at 2
    tree_edge(0, 1);
    tree_edge(1, 2);
    tree_edge(3, 2);
    tree_edge(4, 2);
    tree_edge(5, 4);
    // second tree, token at 7
    tree_edge(6, 7);
    tree_edge(8, 7);
    tree_edge(9, 7);
    tree_edge(10, 7);
    tree_edge(11, 8);
    // bridges
    g.add_edge(3, 6);
    g.add_edge(4, 8);
    g.add_edge(2, 8);
    g.add_edge(5, 11);
    return g;
}

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("bridges finds exactly the cross edges") {
    const LabelledGraph g = two_tree_example();
    const TreeView t1 = tree_of(g, 0), t2 = tree_of(g, 6);
    const BridgeSet b = bridges(g, t1, t2);
    REQUIRE(b.size() == 4);
    CHECK(b.contains(3, 6));
    CHECK(b.contains(4, 8));
    CHECK(b.contains(2, 8));
    CHECK(b.contains(5, 11));
    CHECK(!b.contains(0, 6));
    for (const BridgePair& pair : b.pairs) {
        CHECK(t1.vertices.count(pair.u) == 1);
        CHECK(t2.vertices.count(pair.v) == 1);
        CHECK(pair.degree_u == t1.degree.at(pair.u));
        CHECK(pair.degree_v == t2.degree.at(pair.v));
    }
}

TEST_CASE("separate components have no bridges") {
    LabelledGraph g;
    build_path_tree(g, 3, 0);
    build_path_tree(g, 3, 0);
    const TreeView t1 = tree_of(g, 0), t2 = tree_of(g, 3);
    CHECK(bridges(g, t1, t2).empty());
}

TEST_CASE("complete cross-links between 2-trees give 4 bridges") {
    LabelledGraph g = two_by_two(false);
    g.add_edge(0, 3);
    g.add_edge(1, 2);
    g.add_edge(1, 3);
    const BridgeSet b = bridges(g, tree_of(g, 0), tree_of(g, 2));
    CHECK(b.size() == 4);
}

TEST_CASE("bridges rejects identical trees") {
    LabelledGraph g;
    build_path_tree(g, 3, 0);
    const TreeView t = tree_of(g, 0);
    CHECK_THROWS_AS(bridges(g, t, t), ContractViolation);
}

TEST_CASE("a labelled cross edge is corruption") {
    LabelledGraph g = two_by_two(false);
    const TreeView t1 = tree_of(g, 0), t2 = tree_of(g, 2);
    // forge a tree label onto the bridge after taking the views
    g.set_edge_labels(0, 2, EndpointLabel::TowardToken, EndpointLabel::TowardChild);
    CHECK_THROWS_AS(bridges(g, t1, t2), CorruptionError);
}

TEST_CASE("stationary distribution on small trees") {
    LabelledGraph g;
    build_path_tree(g, 2, 0);
    const Distribution two = stationary_distribution(tree_of(g, 0));
    CHECK(two.probs.at(0) == doctest::Approx(0.5));
    CHECK(two.probs.at(1) == doctest::Approx(0.5));

    LabelledGraph h;
    const auto star = build_star_tree(h, 4); // star of order 5
    const Distribution s = stationary_distribution(tree_of(h, star[0]));
    CHECK(s.probs.at(star[0]) == doctest::Approx(0.5));
    for (std::size_t i = 1; i <= 4; ++i) CHECK(s.probs.at(star[i]) == doctest::Approx(0.125));

    LabelledGraph p;
    build_path_tree(p, 3, 1);
    const Distribution path3 = stationary_distribution(tree_of(p, 0));
    CHECK(path3.probs.at(0) == doctest::Approx(0.25));
    CHECK(path3.probs.at(1) == doctest::Approx(0.5));
    CHECK(path3.probs.at(2) == doctest::Approx(0.25));
}

TEST_CASE("stationary distribution refuses a single-vertex tree") {
    LabelledGraph g;
    g.add_vertex();
    CHECK_THROWS_AS(stationary_distribution(tree_of(g, 0)), ContractViolation);
}

TEST_CASE("stationary matches the walk's dominant eigenvector on a random tree") {
    Rng gen(5150);
    LabelledGraph g;
    const auto ids = random_tree(g, 9, gen);
    const TreeView t = tree_of(g, ids[0]);
    const Distribution stat = stationary_distribution(t);

    // Independent check: iterate the lazy walk pi <- pi/2 + (pi P)/2 (same
    // stationary vector, but aperiodic, so plain iteration converges).
    std::vector<VertexId> order(t.vertices.begin(), t.vertices.end());
    std::map<VertexId, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    std::vector<double> pi(order.size(), 1.0 / double(order.size()));
    for (int round = 0; round < 5000; ++round) {
        std::vector<double> next(order.size(), 0.0);
        for (std::size_t i = 0; i < order.size(); ++i) {
            next[i] += 0.5 * pi[i];
            const auto nbrs = g.tree_neighbors(order[i]);
            for (VertexId w : nbrs) next[pos[w]] += 0.5 * pi[i] / double(nbrs.size());
        }
        pi = next;
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        CHECK(pi[i] == doctest::Approx(stat.probs.at(order[i])).epsilon(1e-9));
    }
}

TEST_CASE("merge probability on the textbook instances") {
    // two 2-vertex trees, 1 bridge
    LabelledGraph g = two_by_two(false);
    const TreeView g1 = tree_of(g, 0), g2 = tree_of(g, 2);
    CHECK(merge_probability(g1, g2, bridges(g, g1, g2)) == doctest::Approx(0.25));

    // path a-b-c plus 2-vertex tree d-e, bridge (b,d): (2/4)(1/2) = 1/4
    LabelledGraph h;
    const auto path = build_path_tree(h, 3, 0);
    const auto pair = build_path_tree(h, 2, 0);
    h.add_edge(path[1], pair[0]);
    const TreeView h1 = tree_of(h, path[0]), h2 = tree_of(h, pair[0]);
    CHECK(merge_probability(h1, h2, bridges(h, h1, h2)) == doctest::Approx(0.25));
}

TEST_CASE("merge probability of the two-tree example is 0.12") {
    // (1*1 + 2*2 + 3*2 + 1*1) / (2*5 * 2*5)
    const LabelledGraph g = two_tree_example();
    const TreeView t1 = tree_of(g, 0), t2 = tree_of(g, 6);
    const double p = merge_probability(t1, t2, bridges(g, t1, t2));
    CHECK(p == doctest::Approx(0.12));
    CHECK(expected_merging_time(t1, t2, bridges(g, t1, t2)) == doctest::Approx(100.0 / 12.0));
}

TEST_CASE("merge probability is symmetric and monotone") {
    const LabelledGraph g = two_tree_example();
    const TreeView t1 = tree_of(g, 0), t2 = tree_of(g, 6);
    const BridgeSet b12 = bridges(g, t1, t2);
    const BridgeSet b21 = bridges(g, t2, t1);
    CHECK(merge_probability(t1, t2, b12) == doctest::Approx(merge_probability(t2, t1, b21)));

    BridgeSet subset;
    subset.pairs = {b12.pairs[0], b12.pairs[1]};
    CHECK(merge_probability(t1, t2, subset) <= merge_probability(t1, t2, b12));
}

TEST_CASE("no bridges means zero probability and infinite time") {
    LabelledGraph g;
    build_path_tree(g, 3, 0);
    build_path_tree(g, 3, 0);
    const TreeView t1 = tree_of(g, 0), t2 = tree_of(g, 3);
    const BridgeSet none = bridges(g, t1, t2);
    CHECK(merge_probability(t1, t2, none) == 0.0);
    CHECK(std::isinf(expected_merging_time(t1, t2, none)));
}

TEST_CASE("expected time times probability is exactly 1") {
    const LabelledGraph g = two_tree_example();
    const TreeView t1 = tree_of(g, 0), t2 = tree_of(g, 6);
    const BridgeSet b = bridges(g, t1, t2);
    CHECK(expected_merging_time(t1, t2, b) * merge_probability(t1, t2, b) ==
          doctest::Approx(1.0));
}

TEST_CASE("average-degree approximation reproduces the reference values") {
    CHECK(avg_degree_expected_merging_time(20, 8, 3) == doctest::Approx(160.0 / 3.0));
    CHECK(avg_degree_expected_merging_time(12, 12, 3) == doctest::Approx(48.0));
    CHECK(avg_degree_expected_merging_time(2, 2, 1) == doctest::Approx(4.0));
}

TEST_CASE("approximation agrees with the exact value when degrees are average") {
    // in the 2x2 instance every bridge endpoint has the average degree 1
    LabelledGraph g = two_by_two(false);
    const TreeView t1 = tree_of(g, 0), t2 = tree_of(g, 2);
    CHECK(avg_degree_expected_merging_time(2, 2, 1) ==
          doctest::Approx(expected_merging_time(t1, t2, bridges(g, t1, t2))));
}

TEST_CASE("approximation validates its inputs") {
    CHECK_THROWS_AS(avg_degree_expected_merging_time(1, 8, 3), ContractViolation);
    CHECK_THROWS_AS(avg_degree_expected_merging_time(8, 1, 3), ContractViolation);
    CHECK_THROWS_AS(avg_degree_expected_merging_time(8, 8, 0), ContractViolation);
}

TEST_CASE("empirical distribution normalizes counts") {
    const Distribution even = empirical_distribution({{1, 1}, {2, 1}});
    CHECK(even.probs.at(1) == doctest::Approx(0.5));
    CHECK(even.probs.at(2) == doctest::Approx(0.5));

    const Distribution skewed = empirical_distribution({{1, 3}, {2, 1}});
    CHECK(skewed.probs.at(1) == doctest::Approx(0.75));
    CHECK(skewed.probs.at(2) == doctest::Approx(0.25));

    CHECK_THROWS_AS(empirical_distribution({{1, 0}, {2, 0}}), ContractViolation);
}

TEST_CASE("distribution distance is total variation in percent") {
    Distribution p, q;
    p.probs = {{1, 0.5}, {2, 0.5}};
    q.probs = {{1, 0.5}, {2, 0.5}};
    CHECK(distribution_distance(p, q) == doctest::Approx(0.0));

    p.probs = {{1, 1.0}, {2, 0.0}};
    q.probs = {{1, 0.0}, {2, 1.0}};
    CHECK(distribution_distance(p, q) == doctest::Approx(100.0));

    p.probs = {{1, 0.75}, {2, 0.25}};
    q.probs = {{1, 0.5}, {2, 0.5}};
    CHECK(distribution_distance(p, q) == doctest::Approx(25.0));
}

TEST_CASE("distribution distance demands a common support") {
    Distribution p, q;
    p.probs = {{1, 1.0}};
    q.probs = {{2, 1.0}};
    CHECK_THROWS_AS(distribution_distance(p, q), ContractViolation);
    q.probs = {{1, 0.5}, {2, 0.5}};
    CHECK_THROWS_AS(distribution_distance(p, q), ContractViolation);
}

} // TEST_SUITE
