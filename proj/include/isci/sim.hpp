#pragma once

#include <cstdint>
#include <vector>

#include "isci/comparators.hpp"
#include "isci/solver.hpp"

namespace isci {

// One Monte Carlo configuration: trial model (graph, weights, shifts),
// data-generating truth (theta, SE, correlation) and replication control.
struct Scenario {
    HypothesisGraph graph;
    InformationWeightSpec weights = InformationWeightSpec::uniform(0.5);
    ShiftSpec shifts;
    std::vector<double> true_theta;    // original scale
    std::vector<double> se;
    std::vector<double> correlation;   // m x m, unit diagonal, PSD
    std::size_t n_sims = 1;
    std::uint64_t seed = 0;
    double eps = 1e-8;
    std::size_t max_iter = 10000;
};

struct MethodMetrics {
    std::vector<double> power;               // freq of hypothesis rejection
    std::vector<double> mean_bound_finite;   // mean of L_j over finite L_j
    std::vector<double> mean_bound_rejected; // mean of L_j over rejections
    std::vector<double> pct_finite;          // freq of finite L_j, in [0,1]
    double coverage = 0.0;                   // freq of {theta_j > L_j for all j}
};

struct ScenarioResult {
    MethodMetrics isci;
    MethodMetrics csci;
    std::size_t solver_failures = 0;
    std::size_t nonconverged = 0;
};

// Lower-triangular Cholesky factor; throws std::invalid_argument when the
// matrix is not symmetric positive definite with unit diagonal.
std::vector<double> cholesky_lower(const std::vector<double>& corr, std::size_t m);

// theta_hat = theta + diag(SE) . chol(corr) . z for the given replication's
// deterministic substream.
std::vector<double> sample_estimates(const Scenario& s, std::uint64_t replication);

// Runs every replication (ISCI via compute_bounds, CSCI via
// compatible_sci) and aggregates. Results are independent of the thread
// count; threads = 0 uses all cores.
ScenarioResult run_scenario(const Scenario& s, unsigned threads = 0);

// q with target = q^delta * alpha_local, i.e. q = (target/alpha_local)^(1/delta).
double calibrate_information_weight(double target_alpha_local, double alpha_local,
                                    double delta);

// Total information (z_alpha + z_beta)^2 / delta^2 for the working margin.
double design_information(double alpha_local, double beta, double delta_n);

// Local level powering a larger effect at the same information:
// 1 - Phi(delta_e * sqrt(I) - z_beta).
double design_alpha_for_effect(double information, double beta, double delta_e);

struct TradeOffRow {
    double q;
    double mean_bound_rejected; // pooled over (replication, hypothesis)
    double se_bound;
    double mean_rejections;     // per replication
    double se_rejections;
    std::size_t failures = 0;   // replications dropped by solver errors
};

// Information/power trade-off: one scenario run per q (uniform weight),
// common random numbers across the grid.
std::vector<TradeOffRow> trade_off_curve(const Scenario& base,
                                         const std::vector<double>& q_grid,
                                         unsigned threads = 0);

} // namespace isci
