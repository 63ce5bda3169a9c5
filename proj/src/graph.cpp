#include "isci/graph.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace isci {

double HypothesisGraph::row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) s += g(i, j);
    return s;
}

ValidationReport validate_graph(const HypothesisGraph& graph) {
    ValidationReport rep;
    const std::size_t m = graph.size();
    auto fail = [&rep](std::string msg) {
        rep.valid = false;
        rep.violations.push_back(std::move(msg));
    };

    if (m == 0) fail("graph has no hypotheses");
    if (graph.initial_levels.size() != m)
        fail("initial_levels length does not match label count");
    if (graph.transitions.size() != m * m)
        fail("transition matrix is not m x m");
    if (!(graph.alpha > 0.0) || !(graph.alpha < 1.0) || !std::isfinite(graph.alpha))
        fail("alpha must lie in (0,1)");
    {
        std::set<std::string> seen(graph.labels.begin(), graph.labels.end());
        if (seen.size() != m) fail("labels are not unique");
    }
    if (!rep.valid) return rep;

    double level_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double a = graph.initial_levels[j];
        if (!(a >= 0.0) || !std::isfinite(a))
            fail("initial level of " + graph.labels[j] + " is negative or non-finite");
        level_sum += a;
    }
    if (std::fabs(level_sum - graph.alpha) > kLevelSumTol)
        fail("initial levels do not sum to alpha");

    bool complete = true;
    for (std::size_t i = 0; i < m; ++i) {
        if (graph.g(i, i) != 0.0) fail("nonzero diagonal at " + graph.labels[i]);
        double rs = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double w = graph.g(i, j);
            if (!(w >= 0.0) || w > 1.0 || !std::isfinite(w))
                fail("transition weight outside [0,1] in row " + graph.labels[i]);
            rs += w;
        }
        if (rs > 1.0 + kLevelSumTol)
            fail("row sum exceeds 1 at " + graph.labels[i]);
        if (std::fabs(rs - 1.0) > kLevelSumTol) complete = false;
    }
    rep.complete = rep.valid && complete;
    return rep;
}

void require_valid(const HypothesisGraph& g) {
    const ValidationReport rep = validate_graph(g);
    if (!rep.valid)
        throw std::invalid_argument("invalid graph: " + rep.violations.front());
}

GraphState GraphState::from(const HypothesisGraph& g) {
    GraphState s;
    s.n = g.size();
    s.levels = g.initial_levels;
    s.transitions = g.transitions;
    s.alive.assign(s.n, 1);
    return s;
}

std::vector<std::size_t> GraphState::rejected() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (!alive[i]) out.push_back(i);
    return out;
}

double GraphState::live_level_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (alive[i]) s += levels[i];
    return s;
}

void reject_node_inplace(GraphState& s, std::size_t i) {
    if (i >= s.n) throw std::out_of_range("reject_node: index out of range");
    if (!s.alive[i]) throw std::invalid_argument("reject_node: node already rejected");

    const std::size_t n = s.n;

    // Level reallocation along the outgoing arrows of i.
    const double ai = s.levels[i];
    for (std::size_t j = 0; j < n; ++j)
        if (s.alive[j] && j != i) s.levels[j] += ai * s.g(i, j);
    s.levels[i] = 0.0;

    // Rewire the remaining arrows through i. Row j's update reads only
    // rows j and i, and row i is zeroed last, so this is safe in place.
    for (std::size_t j = 0; j < n; ++j) {
        if (!s.alive[j] || j == i) continue;
        const double gji = s.g(j, i);
        const double gij = s.g(i, j);
        const double loop = gji * gij;
        for (std::size_t l = 0; l < n; ++l) {
            if (!s.alive[l] || l == j || l == i) continue;
            s.g(j, l) = (loop != 1.0)
                            ? (s.g(j, l) + gji * s.g(i, l)) / (1.0 - loop)
                            : 0.0;
        }
        s.g(j, i) = 0.0;
    }
    for (std::size_t k = 0; k < n; ++k) s.g(i, k) = 0.0;
    s.alive[i] = 0;
}

GraphState reject_node(const GraphState& s, std::size_t i) {
    GraphState out = s;
    reject_node_inplace(out, i);
    return out;
}

RejectionResult run_graphical_test(const HypothesisGraph& g, const std::vector<double>& pvalues) {
    require_valid(g);
    const std::size_t m = g.size();
    if (pvalues.size() != m)
        throw std::invalid_argument("run_graphical_test: p-value count does not match graph size");
    for (double p : pvalues)
        if (!(p >= 0.0) || p > 1.0 || !std::isfinite(p))
            throw std::invalid_argument("run_graphical_test: p-values must lie in [0,1]");

    GraphState s = GraphState::from(g);
    // Scan in index order and restart after each rejection; the outcome is
    // order-invariant, so the fixed order is canonical.
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t j = 0; j < m; ++j) {
            if (!s.alive[j]) continue;
            if (pvalues[j] <= s.levels[j]) { // level 0 rejects only p = 0
                reject_node_inplace(s, j);
                progress = true;
                break;
            }
        }
    }

    RejectionResult res;
    res.rejected = s.rejected();
    res.final_levels = s.levels;
    return res;
}

} // namespace isci
