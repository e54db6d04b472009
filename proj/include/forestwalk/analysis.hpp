#ifndef FORESTWALK_ANALYSIS_HPP
#define FORESTWALK_ANALYSIS_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "forestwalk/graph.hpp"
#include "forestwalk/protocol.hpp"

namespace forestwalk {

// A non-tree edge joining two distinct trees, annotated with the tree
// degrees of its endpoints (the quantities the merge-probability sum needs).
struct BridgePair {
    VertexId u = 0; // endpoint in the first tree
    VertexId v = 0; // endpoint in the second tree
    std::size_t degree_u = 0;
    std::size_t degree_v = 0;
};

struct BridgeSet {
    std::vector<BridgePair> pairs;

    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
    bool contains(VertexId a, VertexId b) const {
        for (const BridgePair& p : pairs) {
            if ((p.u == a && p.v == b) || (p.u == b && p.v == a)) return true;
        }
        return false;
    }
};

// Probability vector over vertices. Nonnegative entries summing to 1.
struct Distribution {
    std::map<VertexId, double> probs;
};

// All cross edges between the two trees' vertex sets. The trees must be
// distinct views of the same graph.
BridgeSet bridges(const LabelledGraph& graph, const TreeView& t1, const TreeView& t2);

// Long-run token-presence probabilities on one tree: d(v) / (2 |E_T|).
// Undefined (throws) for a single-vertex tree.
Distribution stationary_distribution(const TreeView& t);

// Probability that the two tokens sit on a common bridge's endpoints at a
// given step, assuming both walks are stationary: sum over bridges of the
// product of the endpoint probabilities. Zero when no bridge exists.
double merge_probability(const TreeView& t1, const TreeView& t2, const BridgeSet& b);

// Reciprocal of merge_probability, in steps. Returns +infinity when the
// merge probability is zero (no bridge: merging is impossible).
double expected_merging_time(const TreeView& t1, const TreeView& t2, const BridgeSet& b);

// The coarse approximation with every bridge-endpoint degree replaced by its
// tree's average degree 2|E_T|/|V_T|: each bridge term collapses to
// 1/(order1*order2), so the expectation is order1*order2/bridge_count.
double avg_degree_expected_merging_time(std::size_t order1, std::size_t order2,
                                        std::size_t bridge_count);

// Normalize visit counts into a Distribution. Total must be positive.
Distribution empirical_distribution(const std::map<VertexId, std::uint64_t>& occupancy);

// Distance between two distributions over the same support, as a percentage:
// 100 * (1/2) * sum |p - q|  (total variation, range 0..100).
double distribution_distance(const Distribution& p, const Distribution& q);

// Scheduler model the exact solver assumes; must match the simulator.
enum class SchedulerModel { UniformTokenSelection };

// Exact expected number of token moves until the two tokens first occupy a
// common bridge's endpoints (where rule r3 can fire), starting from the
// trees' current token positions. Solves the first-passage linear system on
// the product chain (position in t1) x (position in t2) with one token
// chosen uniformly per step; a stuck token (tree-degree 0) stays put but its
// selection still costs a step. Returns +infinity if the tokens can never
// become adjacent. Uniform policy only; state spaces above ~10^4 are refused.
double markov_exact_merging_time(const LabelledGraph& graph, const TreeView& t1,
                                 const TreeView& t2, const WalkPolicy& policy,
                                 SchedulerModel model);

} // namespace forestwalk

#endif // FORESTWALK_ANALYSIS_HPP
