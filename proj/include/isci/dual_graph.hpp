#pragma once

#include <cstddef>
#include <vector>

#include "isci/graph.hpp"
#include "isci/weights.hpp"

namespace isci {

// Dual graph G^mu: every hypothesis is represented by its shifted node
// H_j^{mu_j}. For mu_j <= 0 the original node is relabelled in place and
// its outgoing arrows deleted; for mu_j > 0 a fresh level-0 node is
// appended, fed from H_j with the boundary-adjusted weight, and H_j's remaining
// arrows are rescaled by (1 - Q_j(mu_j)).
struct DualGraph {
    HypothesisGraph graph;
    std::vector<std::size_t> shifted_node; // m entries: node index of H_j^{mu_j}
    std::vector<std::size_t> null_nodes;   // original nodes still present (mu_j > 0)
    std::vector<std::size_t> base_of;      // graph node -> base hypothesis index
};

DualGraph build_dual_graph(const HypothesisGraph& g, const std::vector<double>& mu,
                           const InformationWeightSpec& w);

struct LocalLevels {
    std::vector<double> alpha_mu; // final level of H_j^{mu_j} after step two
    std::vector<double> nu;       // alpha_mu / (alpha * effective weight)
};

// Step two: rejects every original null node in G^mu and reads the final
// levels of the shifted nodes.
LocalLevels local_levels(const HypothesisGraph& g, const std::vector<double>& mu,
                         const InformationWeightSpec& w);

// Effective transfer weight of hypothesis j at shift mu, based on the
// base graph's row sum.
double shifted_node_weight(const HypothesisGraph& g, const InformationWeightSpec& w,
                           std::size_t j, double mu);

// Allocation-free twin of local_levels for hot loops (solver iterations,
// grid oracle tables, simulation replications). Validates its inputs once
// at construction and reuses scratch buffers afterwards, so an engine is
// not safe for concurrent use; create one per thread.
class LevelEngine {
public:
    LevelEngine(const HypothesisGraph& g, const InformationWeightSpec& w);

    // alpha_mu and nu must hold m doubles each.
    void compute(const std::vector<double>& mu, double* alpha_mu, double* nu);

    double weight(std::size_t j, double mu) const {
        return (mu > 0.0) ? effective_weight(row_sums_[j], weights_->value(j, mu)) : 1.0;
    }
    double alpha() const { return base_->alpha; }
    std::size_t size() const { return m_; }

private:
    const HypothesisGraph* base_;
    const InformationWeightSpec* weights_;
    std::size_t m_;
    std::vector<double> row_sums_;
    // scratch
    std::vector<double> levels_, trans_, wvals_;
    std::vector<std::size_t> shifted_;
    std::vector<std::uint8_t> alive_;
};

} // namespace isci
