#include "isci/comparators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace isci {

namespace {
void check_fallback(const FallbackSpec& spec) {
    if (spec.weights.empty())
        throw std::invalid_argument("fallback: empty weight vector");
    double sum = 0.0;
    for (double c : spec.weights) {
        if (!(c >= 0.0) || !std::isfinite(c))
            throw std::invalid_argument("fallback: weights must be non-negative");
        sum += c;
    }
    if (std::fabs(sum - 1.0) > kLevelSumTol)
        throw std::invalid_argument("fallback: weights must sum to 1");
    if (!(spec.q > 0.0) || spec.q > 1.0)
        throw std::invalid_argument("fallback: q must lie in (0,1]");
}
} // namespace

BoundsVector bonferroni_bounds(const std::vector<MarginalModel>& models,
                               const std::vector<double>& levels,
                               const ShiftSpec& shifts) {
    if (models.size() != levels.size())
        throw std::invalid_argument("bonferroni_bounds: level count does not match models");
    const std::vector<MarginalModel> work = apply_shift(models, shifts);
    BoundsVector b;
    b.lower.resize(models.size());
    for (std::size_t j = 0; j < models.size(); ++j) {
        if (!(levels[j] >= 0.0) || levels[j] >= 1.0)
            throw std::invalid_argument("bonferroni_bounds: levels must lie in [0,1)");
        const double L = inverse_pvalue(work[j], levels[j]);
        b.lower[j] = (L == kNegInf) ? kNegInf : L - shifts.at(j);
    }
    return b;
}

std::vector<double> fallback_nu(const FallbackSpec& spec, const std::vector<double>& mu) {
    check_fallback(spec);
    const std::size_t m = spec.weights.size();
    if (mu.size() != m)
        throw std::invalid_argument("fallback_nu: mu length does not match weights");
    std::vector<double> nu(m);
    for (std::size_t j = 0; j < m; ++j) {
        double acc = spec.weights[j];
        double prod = 1.0;
        // run the product backwards from s = j-1 down to l
        for (std::size_t l = j; l-- > 0;) {
            const double e = std::max(mu[l], 0.0);
            prod *= 1.0 - std::pow(spec.q, e);
            acc += spec.weights[l] * prod;
        }
        nu[j] = acc;
    }
    return nu;
}

BoundsVector fallback_bounds(const FallbackSpec& spec, double alpha,
                             const std::vector<MarginalModel>& models,
                             const ShiftSpec& shifts, double root_tol) {
    check_fallback(spec);
    const std::size_t m = spec.weights.size();
    if (models.size() != m)
        throw std::invalid_argument("fallback_bounds: model count does not match weights");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("fallback_bounds: alpha must lie in (0,1)");
    const std::vector<MarginalModel> work = apply_shift(models, shifts);

    // nu_j depends only on mu_1..mu_{j-1}, so one solve per hypothesis in
    // chain order is the exact fixed point.
    std::vector<double> L(m, kNegInf);
    for (std::size_t j = 0; j < m; ++j) {
        const double target = fallback_nu(spec, L)[j] * alpha;
        const bool last = (j + 1 == m);
        if (!(target > 0.0)) {
            L[j] = kNegInf;
            continue;
        }
        const double p0 = shifted_pvalue(work[j], 0.0);
        if (p0 > target) {
            L[j] = inverse_pvalue(work[j], target);
        } else if (last) {
            // weight 1 for the final chain element
            L[j] = inverse_pvalue(work[j], target);
        } else {
            double lo = 0.0, hi = inverse_pvalue(work[j], target);
            while (hi - lo > root_tol) {
                const double mid = 0.5 * (lo + hi);
                const double f = shifted_pvalue(work[j], mid) -
                                 target * std::pow(spec.q, mid);
                if (f < 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            L[j] = 0.5 * (lo + hi);
        }
    }

    BoundsVector b;
    b.lower.resize(m);
    for (std::size_t j = 0; j < m; ++j)
        b.lower[j] = (L[j] == kNegInf) ? kNegInf : L[j] - shifts.at(j);
    return b;
}

HypothesisGraph fallback_graph(const std::vector<double>& weights, double alpha) {
    const std::size_t m = weights.size();
    HypothesisGraph g;
    g.alpha = alpha;
    g.labels.resize(m);
    g.initial_levels.resize(m);
    g.transitions.assign(m * m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        g.labels[j] = "H" + std::to_string(j + 1);
        g.initial_levels[j] = weights[j] * alpha;
        if (j + 1 < m) g.g(j, j + 1) = 1.0;
    }
    return g;
}

BoundsVector compatible_sci(const HypothesisGraph& g,
                            const std::vector<MarginalModel>& models,
                            const ShiftSpec& shifts) {
    require_valid(g);
    if (models.size() != g.size())
        throw std::invalid_argument("compatible_sci: model count does not match graph size");
    const std::size_t m = g.size();
    const std::vector<MarginalModel> work = apply_shift(models, shifts);

    std::vector<double> p(m);
    for (std::size_t j = 0; j < m; ++j) p[j] = shifted_pvalue(work[j], 0.0);
    const RejectionResult res = run_graphical_test(g, p);

    std::vector<std::uint8_t> rejected(m, 0);
    for (std::size_t j : res.rejected) rejected[j] = 1;
    const bool all_rejected = res.rejected.size() == m;

    BoundsVector b;
    b.lower.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        double L;
        if (all_rejected) {
            // everything rejected: spend the initial weights on the bounds
            L = std::max(0.0, inverse_pvalue(work[j], g.initial_levels[j]));
        } else if (rejected[j]) {
            L = 0.0; // stuck at the null border
        } else {
            L = inverse_pvalue(work[j], res.final_levels[j]);
        }
        b.lower[j] = (L == kNegInf) ? kNegInf : L - shifts.at(j);
    }
    return b;
}

} // namespace isci
