#pragma once

#include <cstddef>
#include <vector>

#include "isci/dual_graph.hpp"
#include "isci/pvalue.hpp"

namespace isci {

// Lower SCI bounds, original scale; entries are finite or -inf. The
// induced multiple test rejects H_j iff the working-scale bound is >= 0.
struct BoundsVector {
    std::vector<double> lower;
};

struct IterationTrace {
    std::vector<std::vector<double>> iterates; // mu^(0), mu^(1), ... (working scale)
    bool converged = false;
    std::size_t iterations = 0;
    double final_step_norm = 0.0;
};

struct SolveOptions {
    double eps = 1e-8;          // Euclidean stopping norm over finite coordinates
    std::size_t max_iter = 10000;
    double root_tol = 1e-10;    // bisection tolerance of the per-coordinate solves
    bool record_trace = true;
};

// Starting vector mu_j = min{0, p_j^{-1}(alpha_j)}, with p^{-1}(0) = -inf.
std::vector<double> starting_value(const HypothesisGraph& g,
                                   const std::vector<MarginalModel>& models);

// One sweep of the fixed-point map: solves, per coordinate, the level
// equation p_j(x) = nu_j(mu_k) * alpha * W_j(x); -inf when the right side
// vanishes. Closed form below zero, bisection on [0, p_j^{-1}(nu alpha)]
// above.
std::vector<double> iterate_step(const HypothesisGraph& g,
                                 const std::vector<MarginalModel>& models,
                                 const InformationWeightSpec& w,
                                 const std::vector<double>& mu_k,
                                 double root_tol = 1e-10);

struct BoundsComputation {
    BoundsVector bounds; // original scale (shift undone)
    IterationTrace trace;
};

// Full solve: starting value, then iterate until the step norm over finite
// coordinates drops below eps (a coordinate leaving -inf forces another
// round) or max_iter runs out (trace.converged = false then).
BoundsComputation compute_bounds(const HypothesisGraph& g,
                                 const std::vector<MarginalModel>& models,
                                 const InformationWeightSpec& w,
                                 const ShiftSpec& shifts = {},
                                 const SolveOptions& opt = {});

// Adjusted p-value of the intersection hypothesis H^mu:
// min over {j: w_j > 0} of p_j(mu_j)/w_j with w_j = alpha_j^mu / alpha;
// 1 when no weight is positive and every p_j is.
double adjusted_p(const HypothesisGraph& g, const std::vector<MarginalModel>& models,
                  const InformationWeightSpec& w, const std::vector<double>& mu);

// Induced test of a working-scale bounds vector: {j: L_j >= 0}.
std::vector<std::size_t> induced_test(const BoundsVector& b);

struct GridSpec {
    std::vector<double> lo; // per-coordinate box
    std::vector<double> hi;
    double step = 1e-3;
};

enum class BracketStatus { ok, hit_lower, hit_upper };

struct BruteForceResult {
    BoundsVector bounds;
    std::vector<BracketStatus> status;
};

// Exhaustive projection oracle on a grid (m <= 3): per coordinate j, the
// largest grid value v such that every grid point of the slab mu_j = v is
// rejected by some coordinate of the dual-graph Bonferroni test. Serves
// as the independent check of compute_bounds; hit_lower/hit_upper flag a
// box that failed to bracket.
BruteForceResult brute_force_bounds(const HypothesisGraph& g,
                                    const std::vector<MarginalModel>& models,
                                    const InformationWeightSpec& w,
                                    const GridSpec& grid);

} // namespace isci
