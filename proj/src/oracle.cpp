#include <deque>
#include <limits>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "forestwalk/analysis.hpp"

namespace forestwalk {

namespace {

constexpr std::size_t kMaxStates = 10000;

} // namespace

double markov_exact_merging_time(const LabelledGraph& graph, const TreeView& t1,
                                 const TreeView& t2, const WalkPolicy& policy,
                                 SchedulerModel model) {
    (void)model; // single model today: uniform token selection
    if (policy.is_biased()) {
        throw UnsupportedError("markov_exact_merging_time supports the uniform policy only "
                               "(memory walks are not Markov on vertex positions)");
    }

    const std::vector<VertexId> vs1(t1.vertices.begin(), t1.vertices.end());
    const std::vector<VertexId> vs2(t2.vertices.begin(), t2.vertices.end());
    const std::size_t n1 = vs1.size();
    const std::size_t n2 = vs2.size();
    const std::size_t n_states = n1 * n2;
    if (n_states > kMaxStates) {
        throw UnsupportedError("product state space too large: " + std::to_string(n_states) +
                               " states (limit " + std::to_string(kMaxStates) + ")");
    }

    std::map<VertexId, std::size_t> index1, index2;
    for (std::size_t i = 0; i < n1; ++i) index1[vs1[i]] = i;
    for (std::size_t j = 0; j < n2; ++j) index2[vs2[j]] = j;
    const auto state_of = [&](std::size_t i, std::size_t j) { return i * n2 + j; };

    // Per-tree move sets (tree edges only). A token on a tree-degree-0
    // vertex has nowhere to go and stays; its turn still costs a step.
    std::vector<std::vector<std::size_t>> moves1(n1), moves2(n2);
    for (std::size_t i = 0; i < n1; ++i) {
        for (VertexId w : graph.tree_neighbors(vs1[i])) moves1[i].push_back(index1.at(w));
    }
    for (std::size_t j = 0; j < n2; ++j) {
        for (VertexId w : graph.tree_neighbors(vs2[j])) moves2[j].push_back(index2.at(w));
    }

    // Absorbing states: both tokens on a common bridge's endpoints (r3 fires
    // there before any further circulation).
    std::vector<bool> absorbing(n_states, false);
    for (const BridgePair& b : bridges(graph, t1, t2).pairs) {
        absorbing[state_of(index1.at(b.u), index2.at(b.v))] = true;
    }

    // Transition targets with probabilities, transposed on the fly for the
    // reachability pass: predecessors[s] = states that step into s.
    struct Arc {
        std::size_t to;
        double p;
    };
    const auto arcs_from = [&](std::size_t s) {
        std::vector<Arc> arcs;
        const std::size_t i = s / n2;
        const std::size_t j = s % n2;
        if (moves1[i].empty()) {
            arcs.push_back({s, 0.5});
        } else {
            const double p = 0.5 / static_cast<double>(moves1[i].size());
            for (std::size_t k : moves1[i]) arcs.push_back({state_of(k, j), p});
        }
        if (moves2[j].empty()) {
            arcs.push_back({s, 0.5});
        } else {
            const double p = 0.5 / static_cast<double>(moves2[j].size());
            for (std::size_t k : moves2[j]) arcs.push_back({state_of(i, k), p});
        }
        return arcs;
    };

    const std::size_t start = state_of(index1.at(t1.token_holder), index2.at(t2.token_holder));
    if (absorbing[start]) return 0.0;

    // Transient states the walk can actually visit from the start. If any of
    // them cannot reach an absorbing state, a positive-probability trajectory
    // never merges and the expectation is infinite (and the naive linear
    // system would be singular), so that case is answered directly.
    std::vector<bool> forward(n_states, false);
    std::vector<std::size_t> transient;
    {
        std::deque<std::size_t> frontier{start};
        forward[start] = true;
        while (!frontier.empty()) {
            const std::size_t s = frontier.front();
            frontier.pop_front();
            transient.push_back(s);
            for (const Arc& a : arcs_from(s)) {
                if (!forward[a.to] && !absorbing[a.to]) {
                    forward[a.to] = true;
                    frontier.push_back(a.to);
                }
            }
        }
    }
    {
        std::vector<std::vector<std::size_t>> predecessors(n_states);
        std::deque<std::size_t> frontier;
        std::vector<bool> can_reach(n_states, false);
        for (std::size_t s : transient) {
            for (const Arc& a : arcs_from(s)) {
                if (absorbing[a.to]) {
                    if (!can_reach[s]) {
                        can_reach[s] = true;
                        frontier.push_back(s);
                    }
                } else {
                    predecessors[a.to].push_back(s);
                }
            }
        }
        while (!frontier.empty()) {
            const std::size_t s = frontier.front();
            frontier.pop_front();
            for (std::size_t pred : predecessors[s]) {
                if (!can_reach[pred]) {
                    can_reach[pred] = true;
                    frontier.push_back(pred);
                }
            }
        }
        for (std::size_t s : transient) {
            if (!can_reach[s]) return std::numeric_limits<double>::infinity();
        }
    }

    // Solve (I - P_tt) h = 1 over the reachable transient states.
    std::vector<std::ptrdiff_t> row_of(n_states, -1);
    for (std::size_t r = 0; r < transient.size(); ++r) {
        row_of[transient[r]] = static_cast<std::ptrdiff_t>(r);
    }
    const std::size_t m = transient.size();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(m * 4);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t s = transient[r];
        double diag = 1.0;
        for (const Arc& a : arcs_from(s)) {
            if (a.to == s) {
                diag -= a.p;
            } else if (row_of[a.to] >= 0) {
                triplets.emplace_back(static_cast<int>(r), static_cast<int>(row_of[a.to]), -a.p);
            }
            // arcs into absorbing states contribute h = 0
        }
        triplets.emplace_back(static_cast<int>(r), static_cast<int>(r), diag);
    }

    Eigen::SparseMatrix<double> system(static_cast<int>(m), static_cast<int>(m));
    system.setFromTriplets(triplets.begin(), triplets.end());
    system.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.analyzePattern(system);
    solver.factorize(system);
    if (solver.info() != Eigen::Success) {
        throw UnsupportedError("first-passage system could not be factorized");
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<int>(m));
    const Eigen::VectorXd h = solver.solve(ones);
    if (solver.info() != Eigen::Success) {
        throw UnsupportedError("first-passage system could not be solved");
    }
    return h(static_cast<int>(row_of[start]));
}

} // namespace forestwalk
