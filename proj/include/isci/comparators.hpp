#pragma once

#include <cstddef>
#include <vector>

#include "isci/graph.hpp"
#include "isci/pvalue.hpp"
#include "isci/solver.hpp"

namespace isci {

// Fallback/fixed-sequence chain: initial weights c_j = alpha_j/alpha
// summing to one, plus a single information weight.
struct FallbackSpec {
    std::vector<double> weights;
    double q = 0.5;
};

// Weighted Bonferroni bounds L_j = p_j^{-1}(alpha_j); -inf where the
// level is zero. Equals compute_bounds with q = 1 on any graph.
BoundsVector bonferroni_bounds(const std::vector<MarginalModel>& models,
                               const std::vector<double>& levels,
                               const ShiftSpec& shifts = {});

// Closed-form fallback weight function:
// nu_j(mu) = sum_{l<j} c_l prod_{s=l..j-1} (1 - q^(mu_s v 0)) + c_j.
std::vector<double> fallback_nu(const FallbackSpec& spec, const std::vector<double>& mu);

// Sequential informative bounds for the fallback chain; the last
// hypothesis solves with weight 1 (incomplete final row). The fixed
// sequence is the special case c = (1, 0, ..., 0).
BoundsVector fallback_bounds(const FallbackSpec& spec, double alpha,
                             const std::vector<MarginalModel>& models,
                             const ShiftSpec& shifts = {}, double root_tol = 1e-12);

// The fallback chain as a HypothesisGraph (row m has no outgoing arrows).
HypothesisGraph fallback_graph(const std::vector<double>& weights, double alpha);

// Compatible SCIs of the underlying graphical test: bounds stick to the
// null border for rejected hypotheses unless everything is rejected, in
// which case the initial weights are spent on the bounds.
BoundsVector compatible_sci(const HypothesisGraph& g,
                            const std::vector<MarginalModel>& models,
                            const ShiftSpec& shifts = {});

} // namespace isci
