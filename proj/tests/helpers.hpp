#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "isci/graph.hpp"
#include "isci/pvalue.hpp"

namespace testutil {

inline double rnd(std::mt19937_64& eng, double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(eng);
}

// Unweighted Holm graph: equal levels, equal off-diagonal weights.
inline isci::HypothesisGraph holm_graph(std::size_t m, double alpha) {
    isci::HypothesisGraph g;
    g.alpha = alpha;
    g.labels.resize(m);
    g.initial_levels.assign(m, alpha / static_cast<double>(m));
    g.transitions.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        g.labels[i] = "H" + std::to_string(i + 1);
        for (std::size_t j = 0; j < m; ++j)
            if (i != j) g.g(i, j) = 1.0 / static_cast<double>(m - 1);
    }
    return g;
}

// Six-node efficacy/safety graph: three treatments, efficacy gatekeeping
// safety, level alpha/3 on each efficacy node.
inline isci::HypothesisGraph three_dose_graph(double alpha) {
    isci::HypothesisGraph g;
    g.alpha = alpha;
    g.labels = {"E1", "E2", "E3", "S1", "S2", "S3"};
    g.initial_levels = {alpha / 3, alpha / 3, alpha / 3, 0.0, 0.0, 0.0};
    g.transitions.assign(36, 0.0);
    g.g(0, 3) = 1.0;
    g.g(1, 4) = 1.0;
    g.g(2, 5) = 1.0;
    g.g(3, 1) = 0.5;
    g.g(3, 2) = 0.5;
    g.g(4, 0) = 0.5;
    g.g(4, 2) = 0.5;
    g.g(5, 0) = 0.5;
    g.g(5, 1) = 0.5;
    return g;
}

// Two-dose variant: E_j gatekeeps S_j, safety passes on to the other dose.
inline isci::HypothesisGraph two_dose_graph(double alpha) {
    isci::HypothesisGraph g;
    g.alpha = alpha;
    g.labels = {"E1", "E2", "S1", "S2"};
    g.initial_levels = {alpha / 2, alpha / 2, 0.0, 0.0};
    g.transitions.assign(16, 0.0);
    g.g(0, 2) = 1.0;
    g.g(1, 3) = 1.0;
    g.g(2, 1) = 1.0;
    g.g(3, 0) = 1.0;
    return g;
}

inline isci::HypothesisGraph random_complete_graph(std::mt19937_64& eng, std::size_t m,
                                                   double alpha,
                                                   bool strictly_positive_levels = false) {
    isci::HypothesisGraph g;
    g.alpha = alpha;
    g.labels.resize(m);
    g.initial_levels.resize(m);
    g.transitions.assign(m * m, 0.0);
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        g.labels[j] = "H" + std::to_string(j + 1);
        double v = rnd(eng, 0.0, 1.0);
        if (strictly_positive_levels) v = 0.15 + v;
        else if (v < 0.15) v = 0.0; // occasional level-0 node
        g.initial_levels[j] = v;
        sum += v;
    }
    if (sum == 0.0) {
        g.initial_levels[0] = 1.0;
        sum = 1.0;
    }
    for (std::size_t j = 0; j < m; ++j) g.initial_levels[j] *= alpha / sum;

    for (std::size_t i = 0; i < m; ++i) {
        double rs = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) rs += (g.g(i, j) = rnd(eng, 0.0, 1.0));
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) g.g(i, j) /= rs;
    }
    return g;
}

inline std::vector<isci::MarginalModel> random_models(std::mt19937_64& eng, std::size_t m,
                                                      double theta_lo, double theta_hi,
                                                      double se_lo = 0.5, double se_hi = 1.5) {
    std::vector<isci::MarginalModel> models(m);
    for (auto& mm : models) {
        mm.estimate = rnd(eng, theta_lo, theta_hi);
        mm.se = rnd(eng, se_lo, se_hi);
    }
    return models;
}

} // namespace testutil
