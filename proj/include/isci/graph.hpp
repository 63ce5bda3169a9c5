#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace isci {

inline constexpr double kLevelSumTol = 1e-12;
inline constexpr double kConservationTol = 1e-10;

// A graphical multiple-test procedure: initial local levels alpha_j
// summing to the overall level alpha, and a transition matrix (g_ij)
// redistributing a node's level along its outgoing arrows on rejection.
struct HypothesisGraph {
    std::vector<std::string> labels;
    std::vector<double> initial_levels;
    double alpha = 0.0;
    std::vector<double> transitions; // row-major m x m

    std::size_t size() const { return labels.size(); }
    double g(std::size_t i, std::size_t j) const { return transitions[i * size() + j]; }
    double& g(std::size_t i, std::size_t j) { return transitions[i * size() + j]; }
    double row_sum(std::size_t i) const;
};

struct ValidationReport {
    bool valid = true;
    bool complete = false; // every row sums to one
    std::vector<std::string> violations;
};

ValidationReport validate_graph(const HypothesisGraph& g);

// Throws std::invalid_argument with the first violation if invalid.
void require_valid(const HypothesisGraph& g);

// Mutable rejection state over a graph: levels and transitions of the
// surviving nodes. Rejected nodes keep level 0 and zeroed arrows.
struct GraphState {
    std::vector<double> levels;
    std::vector<double> transitions;
    std::vector<std::uint8_t> alive;
    std::size_t n = 0;

    static GraphState from(const HypothesisGraph& g);

    double g(std::size_t i, std::size_t j) const { return transitions[i * n + j]; }
    double& g(std::size_t i, std::size_t j) { return transitions[i * n + j]; }
    std::vector<std::size_t> rejected() const;
    double live_level_sum() const;
};

// Rejection update: level of node i flows along its outgoing weights and
// the remaining arrows are rewired through the removed node.
GraphState reject_node(const GraphState& s, std::size_t i);
void reject_node_inplace(GraphState& s, std::size_t i);

struct RejectionResult {
    std::vector<std::size_t> rejected;  // ascending node indices
    std::vector<double> final_levels;   // full length; rejected entries are 0
};

// Sequential graphical test: repeatedly rejects any live H_j with
// p_j <= current local level (a level-0 node only at p_j = 0) until no
// rejection is possible.
RejectionResult run_graphical_test(const HypothesisGraph& g, const std::vector<double>& pvalues);

} // namespace isci
