#include <doctest.h>

#include <map>
#include <set>
#include <vector>

#include "forestwalk/protocol.hpp"
#include "forestwalk/sim.hpp"
#include "helpers.hpp"

using namespace forestwalk;
using forestwalk::testing::build_path_tree;
using forestwalk::testing::build_star_tree;

TEST_SUITE("protocol") {

// --- r3: merging -------------------------------------------------------------

TEST_CASE("r3 merges two adjacent one-vertex trees") {
    LabelledGraph g;
    const VertexId a = g.add_vertex(), b = g.add_vertex();
    g.add_edge(a, b);
    MemoryTable memory;
    Rng rng(1);
    const StepOutcome out = step_token(g, a, WalkPolicy::uniform(), memory, rng);
    REQUIRE(out.kind == StepOutcome::Kind::Merged);
    CHECK(out.other == b);
    CHECK(g.state_of(a) == VertexState::Token);
    CHECK(g.state_of(b) == VertexState::Plain);
    CHECK(g.label_at(a, b) == EndpointLabel::TowardChild);
    CHECK(g.label_at(b, a) == EndpointLabel::TowardToken);
    const auto views = forest(g);
    REQUIRE(views.size() == 1);
    CHECK(views[0].token_holder == a);
    CHECK(views[0].order() == 2);
}

TEST_CASE("r3 picks uniformly among several token neighbors") {
    std::set<VertexId> chosen;
    std::map<VertexId, int> counts;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        LabelledGraph g;
        const VertexId a = g.add_vertex(), b = g.add_vertex(), c = g.add_vertex();
        g.add_edge(a, b);
        g.add_edge(a, c);
        Rng rng(seed);
        const auto merged = try_merge(g, a, rng);
        REQUIRE(merged.has_value());
        chosen.insert(*merged);
        ++counts[*merged];
        // only one merge per application: the other candidate is still Token
        CHECK(g.state_of(*merged == b ? c : b) == VertexState::Token);
        CHECK(forest(g).size() == 2);
    }
    CHECK(chosen.size() == 2); // both candidates reachable across seeds
}

TEST_CASE("try_merge demands a token vertex") {
    LabelledGraph g;
    build_path_tree(g, 2, 0);
    Rng rng(1);
    CHECK_THROWS_AS(try_merge(g, 1, rng), ContractViolation);
}

TEST_CASE("try_merge ignores same-tree neighbors") {
    LabelledGraph g;
    build_path_tree(g, 3, 1);
    Rng rng(1);
    CHECK(!try_merge(g, 1, rng).has_value());
}

TEST_CASE("merging wins over circulation") {
    // token with both a tree child and an adjacent foreign token: always r3
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        LabelledGraph g;
        const auto path = build_path_tree(g, 2, 0);
        const VertexId lone = g.add_vertex();
        g.add_edge(path[0], lone);
        MemoryTable memory;
        Rng rng(seed);
        const StepOutcome out = step_token(g, path[0], WalkPolicy::uniform(), memory, rng);
        CHECK(out.kind == StepOutcome::Kind::Merged);
        CHECK(out.other == lone);
    }
}

// --- r4: circulation ----------------------------------------------------------

TEST_CASE("a 2-vertex tree bounces the token deterministically") {
    LabelledGraph g;
    const auto ids = build_path_tree(g, 2, 0);
    MemoryTable memory;
    Rng rng(3);
    const auto w = circulate(g, ids[0], WalkPolicy::uniform(), memory, rng);
    REQUIRE(w.has_value());
    CHECK(*w == ids[1]);
    CHECK(g.state_of(ids[0]) == VertexState::Plain);
    CHECK(g.state_of(ids[1]) == VertexState::Token);
    CHECK(g.label_at(ids[0], ids[1]) == EndpointLabel::TowardToken);
    CHECK(g.label_at(ids[1], ids[0]) == EndpointLabel::TowardChild);
    CHECK(forest(g).size() == 1);
    // traversal was recorded at both endpoints, arrival newer
    REQUIRE(memory.stamp_of(ids[0], ids[1]).has_value());
    REQUIRE(memory.stamp_of(ids[1], ids[0]).has_value());
    CHECK(*memory.stamp_of(ids[1], ids[0]) > *memory.stamp_of(ids[0], ids[1]));
}

TEST_CASE("uniform circulation is unbiased at a star center") {
    LabelledGraph g;
    const auto ids = build_star_tree(g, 4);
    Rng rng(11);
    std::map<VertexId, int> counts;
    const int draws = 4000;
    for (int i = 0; i < draws; ++i) {
        LabelledGraph copy = g; // fresh star each draw
        MemoryTable memory;
        const auto w = circulate(copy, ids[0], WalkPolicy::uniform(), memory, rng);
        REQUIRE(w.has_value());
        ++counts[*w];
    }
    REQUIRE(counts.size() == 4);
    double chi2 = 0.0;
    for (const auto& [leaf, c] : counts) {
        const double d = c - draws / 4.0;
        chi2 += d * d / (draws / 4.0);
    }
    CHECK(chi2 < 16.27); // 3 dof, p = 0.001; deterministic seed
}

TEST_CASE("an isolated token stalls") {
    LabelledGraph g;
    const VertexId v = g.add_vertex();
    MemoryTable memory;
    Rng rng(1);
    CHECK(!circulate(g, v, WalkPolicy::uniform(), memory, rng).has_value());
    CHECK(step_token(g, v, WalkPolicy::uniform(), memory, rng).kind ==
          StepOutcome::Kind::Stalled);
    CHECK(g.state_of(v) == VertexState::Token);
}

// --- memory bias ---------------------------------------------------------------

TEST_CASE("memory 1 at a degree-2 vertex forces the fresh edge") {
    LabelledGraph g;
    const auto ids = build_path_tree(g, 3, 1); // a-b-c, token at b
    MemoryTable memory;
    memory.record_traversal(ids[1], ids[0]); // (b,a) is the most recent edge at b
    Rng rng(17);
    const auto w = circulate(g, ids[1], WalkPolicy::memory(1), memory, rng);
    REQUIRE(w.has_value());
    CHECK(*w == ids[2]); // to c with probability 1
}

TEST_CASE("memory falls back to the least recent edge on low degree") {
    LabelledGraph g;
    const auto ids = build_path_tree(g, 2, 0);
    MemoryTable memory;
    Rng rng(5);
    // token walks to the far end; with n = 3 > d(v) = 1 the only edge is
    // excluded, so the fallback sends it straight back
    auto w = circulate(g, ids[0], WalkPolicy::memory(3), memory, rng);
    REQUIRE(w.has_value());
    CHECK(*w == ids[1]);
    w = circulate(g, ids[1], WalkPolicy::memory(3), memory, rng);
    REQUIRE(w.has_value());
    CHECK(*w == ids[0]);
}

TEST_CASE("memory 1 sweeps a path end to end, seed-independently") {
    const std::vector<std::size_t> want = {1, 2, 3, 4, 3, 2, 1, 0, 1};
    for (std::uint64_t seed : {1ULL, 999ULL}) {
        LabelledGraph g;
        const auto ids = build_path_tree(g, 5, 0);
        MemoryTable memory;
        Rng rng(seed);
        VertexId at = ids[0];
        std::vector<std::size_t> got;
        for (std::size_t i = 0; i < want.size(); ++i) {
            const auto w = circulate(g, at, WalkPolicy::memory(1), memory, rng);
            REQUIRE(w.has_value());
            at = *w;
            got.push_back(*w); // ids are 0..4, so the id is the path index
        }
        CHECK(got == want);
    }
}

TEST_CASE("memory 0 walks exactly like uniform") {
    LabelledGraph g1;
    Rng gen(2718);
    random_tree(g1, 12, gen);
    LabelledGraph g2 = g1;
    MemoryTable mem1, mem2;
    Rng rng1(777), rng2(777);
    VertexId at1 = forest(g1)[0].token_holder;
    VertexId at2 = at1;
    for (int i = 0; i < 300; ++i) {
        const auto w1 = circulate(g1, at1, WalkPolicy::uniform(), mem1, rng1);
        const auto w2 = circulate(g2, at2, WalkPolicy::memory(0), mem2, rng2);
        REQUIRE(w1.has_value());
        REQUIRE(w2.has_value());
        CHECK(*w1 == *w2);
        at1 = *w1;
        at2 = *w2;
    }
}

TEST_CASE("memory-allowed choices stay uniform (chi-square)") {
    // degree-3 star, most recent edge = leaf 1: the other two leaves must be
    // hit with equal probability
    Rng rng(404);
    std::map<VertexId, int> counts;
    const int draws = 2000;
    for (int i = 0; i < draws; ++i) {
        LabelledGraph g;
        const auto ids = build_star_tree(g, 3);
        MemoryTable memory;
        memory.record_traversal(ids[0], ids[1]);
        const auto w = circulate(g, ids[0], WalkPolicy::memory(1), memory, rng);
        REQUIRE(w.has_value());
        CHECK(*w != ids[1]);
        ++counts[*w];
    }
    REQUIRE(counts.size() == 2);
    double chi2 = 0.0;
    for (const auto& [leaf, c] : counts) {
        const double d = c - draws / 2.0;
        chi2 += d * d / (draws / 2.0);
    }
    CHECK(chi2 < 10.83); // 1 dof, p = 0.001
}

TEST_CASE("purging a removed edge forgets its stamps") {
    MemoryTable memory;
    memory.record_traversal(1, 2);
    REQUIRE(memory.stamp_of(1, 2).has_value());
    memory.purge_edge(1, 2);
    CHECK(!memory.stamp_of(1, 2).has_value());
    CHECK(!memory.stamp_of(2, 1).has_value());
}

// --- r1/r2: topology reactions --------------------------------------------------

TEST_CASE("r1 regenerates a token on the orphan side") {
    LabelledGraph g;
    const auto ids = build_path_tree(g, 2, 0);
    MemoryTable memory;
    const RemovalNotice notice = g.remove_edge(ids[0], ids[1]);
    const auto rules = react_edge_down(g, notice, memory);
    CHECK(rules == std::vector<RuleId>{RuleId::R1, RuleId::R2});
    CHECK(g.state_of(ids[0]) == VertexState::Token);
    CHECK(g.state_of(ids[1]) == VertexState::Token);
    CHECK(forest(g).size() == 2);
}

TEST_CASE("breaking a mid-path tree edge splits into two valid trees") {
    LabelledGraph g;
    const auto ids = build_path_tree(g, 3, 0); // token at one end
    MemoryTable memory;
    const auto rules = react_edge_down(g, g.remove_edge(ids[1], ids[2]), memory);
    CHECK(rules == std::vector<RuleId>{RuleId::R1, RuleId::R2});
    const auto views = forest(g);
    REQUIRE(views.size() == 2);
    // the severed side regenerated: vertex 2 now holds a token
    CHECK(g.state_of(ids[2]) == VertexState::Token);
    CHECK(g.state_of(ids[0]) == VertexState::Token);
}

TEST_CASE("breaking a non-tree edge applies no rule") {
    LabelledGraph g;
    const VertexId a = g.add_vertex(), b = g.add_vertex();
    g.add_edge(a, b);
    MemoryTable memory;
    const auto rules = react_edge_down(g, g.remove_edge(a, b), memory);
    CHECK(rules.empty());
    CHECK(forest(g).size() == 2);
}

TEST_CASE("k simultaneous breaks regenerate k tokens") {
    LabelledGraph g;
    const auto ids = build_star_tree(g, 6);
    MemoryTable memory;
    std::size_t r1_count = 0;
    for (std::size_t leaf = 1; leaf <= 6; ++leaf) {
        const auto rules = react_edge_down(g, g.remove_edge(ids[0], ids[leaf]), memory);
        for (RuleId r : rules) r1_count += (r == RuleId::R1) ? 1 : 0;
    }
    CHECK(r1_count == 6);
    const auto views = forest(g);
    CHECK(views.size() == 7); // center plus 6 regenerated one-vertex trees
}

TEST_CASE("react purges the broken edge from memory") {
    LabelledGraph g;
    const auto ids = build_path_tree(g, 3, 1);
    MemoryTable memory;
    memory.record_traversal(ids[1], ids[0]);
    react_edge_down(g, g.remove_edge(ids[0], ids[1]), memory);
    CHECK(!memory.stamp_of(ids[1], ids[0]).has_value());
}

TEST_CASE("a token losing a TowardToken endpoint is corruption") {
    LabelledGraph g;
    const VertexId a = g.add_vertex(), b = g.add_vertex();
    g.set_vertex_state(b, VertexState::Plain);
    g.add_edge(a, b);
    // a holds the token yet its endpoint claims the token is across the edge
    g.set_edge_labels(a, b, EndpointLabel::TowardToken, EndpointLabel::TowardChild);
    MemoryTable memory;
    const RemovalNotice notice = g.remove_edge(a, b);
    CHECK_THROWS_AS(react_edge_down(g, notice, memory), CorruptionError);
}

// --- locality ---------------------------------------------------------------------

TEST_CASE("circulation touches only the token's neighborhood") {
    LabelledGraph g;
    const auto ids = build_star_tree(g, 4);
    const VertexId far = g.add_vertex(); // unrelated one-vertex tree
    MemoryTable memory;
    Rng rng(9);
    AccessTrace trace;
    g.set_trace(&trace);
    const auto w = circulate(g, ids[0], WalkPolicy::uniform(), memory, rng);
    g.set_trace(nullptr);
    REQUIRE(w.has_value());
    const std::set<VertexId> neighborhood(ids.begin(), ids.end());
    for (VertexId v : trace.reads) CHECK(neighborhood.count(v) == 1);
    for (VertexId v : trace.writes) CHECK((v == ids[0] || v == *w));
    CHECK(trace.reads.count(far) == 0);
}

TEST_CASE("merging touches only the token's neighborhood") {
    LabelledGraph g;
    const VertexId a = g.add_vertex(), b = g.add_vertex();
    const VertexId far = g.add_vertex();
    g.add_edge(a, b);
    Rng rng(2);
    AccessTrace trace;
    g.set_trace(&trace);
    const auto merged = try_merge(g, a, rng);
    g.set_trace(nullptr);
    REQUIRE(merged.has_value());
    for (VertexId v : trace.reads) CHECK((v == a || v == b));
    for (VertexId v : trace.writes) CHECK((v == a || v == b));
    CHECK(trace.reads.count(far) == 0);
    CHECK(trace.writes.count(far) == 0);
}

TEST_CASE("edge reactions touch only the severed endpoints") {
    LabelledGraph g;
    const auto ids = build_path_tree(g, 4, 0);
    MemoryTable memory;
    const RemovalNotice notice = g.remove_edge(ids[1], ids[2]);
    AccessTrace trace;
    g.set_trace(&trace);
    react_edge_down(g, notice, memory);
    g.set_trace(nullptr);
    for (VertexId v : trace.reads) CHECK((v == ids[1] || v == ids[2]));
    for (VertexId v : trace.writes) CHECK((v == ids[1] || v == ids[2]));
}

// --- conservation ---------------------------------------------------------------

TEST_CASE("step_token conserves tokens except on merge") {
    Rng gen(31);
    LabelledGraph g;
    random_tree(g, 9, gen);
    random_tree(g, 7, gen);
    const auto views = forest(g);
    REQUIRE(views.size() == 2);
    MemoryTable memory;
    Rng rng(64);
    VertexId at = views[0].token_holder;
    for (int i = 0; i < 200; ++i) {
        const StepOutcome out = step_token(g, at, WalkPolicy::uniform(), memory, rng);
        REQUIRE(out.kind == StepOutcome::Kind::Moved);
        at = out.other;
        CHECK(forest(g).size() == 2); // validates the 1:1 token:tree invariant
    }
}

} // TEST_SUITE
