#include "isci/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isci {

namespace {

void check_models(const HypothesisGraph& g, const std::vector<MarginalModel>& models) {
    if (models.size() != g.size())
        throw std::invalid_argument("model count does not match graph size");
}

// Unique root of p(x) = target * W(x). W is non-increasing with W(x) = 1
// on x <= 0, so the equation has a closed form below zero and a bracketed
// root above. Loop rewiring can push target = nu * alpha far above 1 for
// small information weights, but the root still satisfies
// p(root) = target * W(root) <= level_cap (the total level), which caps
// the bracket at p^{-1}(level_cap).
template <class WFn>
double solve_level_equation(const MarginalModel& m, double target, double level_cap,
                            WFn&& W, double tol) {
    if (!(target > 0.0)) return kNegInf;
    const double p0 = shifted_pvalue(m, 0.0);
    if (p0 > target) return inverse_pvalue(m, target);
    if (p0 == target) return 0.0;

    double lo = 0.0;
    double hi = inverse_pvalue(m, std::min(target, level_cap));
    const double fhi = shifted_pvalue(m, hi) - target * W(hi);
    if (fhi < 0.0) {
        // W == 1 up to rounding: the root sits at the bracket top
        if (fhi > -1e-9 * target) return hi;
        throw std::runtime_error("level equation: bracket failed (malformed weight function)");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double f = shifted_pvalue(m, mid) - target * W(mid);
        if (f < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<double> starting_value(const HypothesisGraph& g,
                                   const std::vector<MarginalModel>& models) {
    require_valid(g);
    check_models(g, models);
    std::vector<double> mu(g.size());
    for (std::size_t j = 0; j < g.size(); ++j)
        mu[j] = std::min(0.0, inverse_pvalue(models[j], g.initial_levels[j]));
    return mu;
}

std::vector<double> iterate_step(const HypothesisGraph& g,
                                 const std::vector<MarginalModel>& models,
                                 const InformationWeightSpec& w,
                                 const std::vector<double>& mu_k,
                                 double root_tol) {
    check_models(g, models);
    LevelEngine engine(g, w);
    const std::size_t m = g.size();
    std::vector<double> am(m), nu(m), next(m);
    engine.compute(mu_k, am.data(), nu.data());
    for (std::size_t j = 0; j < m; ++j)
        next[j] = solve_level_equation(
            models[j], nu[j] * g.alpha, g.alpha,
            [&engine, j](double x) { return engine.weight(j, x); }, root_tol);
    return next;
}

BoundsComputation compute_bounds(const HypothesisGraph& g,
                                 const std::vector<MarginalModel>& models,
                                 const InformationWeightSpec& w,
                                 const ShiftSpec& shifts,
                                 const SolveOptions& opt) {
    check_models(g, models);
    const std::vector<MarginalModel> work = apply_shift(models, shifts);
    LevelEngine engine(g, w);
    const std::size_t m = g.size();

    BoundsComputation out;
    std::vector<double> mu = starting_value(g, work);
    if (opt.record_trace) out.trace.iterates.push_back(mu);

    std::vector<double> am(m), nu(m);
    for (std::size_t it = 1; it <= opt.max_iter; ++it) {
        engine.compute(mu, am.data(), nu.data());
        bool switched = false;
        double norm2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double x = solve_level_equation(
                work[j], nu[j] * g.alpha, g.alpha,
                [&engine, j](double t) { return engine.weight(j, t); }, opt.root_tol);
            // The exact map is monotone; clamp out root-solver wiggle.
            x = std::max(x, mu[j]);
            if (mu[j] == kNegInf) {
                if (x != kNegInf) switched = true;
            } else {
                const double d = x - mu[j];
                norm2 += d * d;
            }
            mu[j] = x;
        }
        if (opt.record_trace) out.trace.iterates.push_back(mu);
        out.trace.iterations = it;
        out.trace.final_step_norm = std::sqrt(norm2);
        if (!switched && out.trace.final_step_norm < opt.eps) {
            out.trace.converged = true;
            break;
        }
    }

    out.bounds.lower.resize(m);
    for (std::size_t j = 0; j < m; ++j)
        out.bounds.lower[j] = (mu[j] == kNegInf) ? kNegInf : mu[j] - shifts.at(j);
    return out;
}

double adjusted_p(const HypothesisGraph& g, const std::vector<MarginalModel>& models,
                  const InformationWeightSpec& w, const std::vector<double>& mu) {
    check_models(g, models);
    const LocalLevels ll = local_levels(g, mu, w);
    double best = kPosInf;
    bool any = false;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double wj = ll.alpha_mu[j] / g.alpha;
        const double pj = shifted_pvalue(models[j], mu[j]);
        if (wj > 0.0) {
            any = true;
            best = std::min(best, pj / wj);
        } else if (pj == 0.0) {
            return 0.0; // level-0 rejection convention
        }
    }
    return any ? best : 1.0;
}

std::vector<std::size_t> induced_test(const BoundsVector& b) {
    std::vector<std::size_t> rej;
    for (std::size_t j = 0; j < b.lower.size(); ++j)
        if (b.lower[j] >= 0.0) rej.push_back(j);
    return rej;
}

namespace {

// Mixed-radix walk over the axes of all coordinates except `skip`.
struct SlabIter {
    const std::vector<std::size_t>* sizes;
    std::size_t skip;
    std::vector<std::size_t> t;
    bool done = false;

    SlabIter(const std::vector<std::size_t>& n, std::size_t skip_, std::size_t fixed)
        : sizes(&n), skip(skip_), t(n.size(), 0) {
        t[skip] = fixed;
    }
    void advance() {
        const std::size_t m = sizes->size();
        for (std::size_t k = m; k-- > 0;) {
            if (k == skip) continue;
            if (++t[k] < (*sizes)[k]) return;
            t[k] = 0;
        }
        done = true;
    }
};

} // namespace

BruteForceResult brute_force_bounds(const HypothesisGraph& g,
                                    const std::vector<MarginalModel>& models,
                                    const InformationWeightSpec& w,
                                    const GridSpec& grid) {
    require_valid(g);
    check_models(g, models);
    const std::size_t m = g.size();
    if (m > 3)
        throw std::invalid_argument("brute_force_bounds: grid cost grows as N^m; m <= 3 only");
    if (grid.lo.size() != m || grid.hi.size() != m || !(grid.step > 0.0))
        throw std::invalid_argument("brute_force_bounds: malformed grid");

    std::vector<std::vector<double>> axes(m);
    std::vector<std::size_t> n(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (!(grid.lo[j] < grid.hi[j]))
            throw std::invalid_argument("brute_force_bounds: lo must be below hi");
        for (double v = grid.lo[j]; v <= grid.hi[j] + grid.step * 0.5; v += grid.step)
            axes[j].push_back(v);
        n[j] = axes[j].size();
    }

    LevelEngine engine(g, w);
    const double alpha = g.alpha;

    // Per-coordinate rejection statistic A_j(v) = p_j(v)/W_j(v) and the raw
    // p-values: the point mu rejects via j iff A_j(mu_j) <= alpha * nu_j(mu),
    // equivalently p_j(mu_j) <= alpha_j^mu.
    std::vector<std::vector<double>> stat(m), pval(m);
    for (std::size_t j = 0; j < m; ++j) {
        stat[j].resize(n[j]);
        pval[j].resize(n[j]);
        for (std::size_t t = 0; t < n[j]; ++t) {
            const double v = axes[j][t];
            pval[j][t] = shifted_pvalue(models[j], v);
            stat[j][t] = pval[j][t] / engine.weight(j, v);
        }
    }

    // nu_j depends on the whole vector, including mu_j itself (the rewiring
    // denominators couple a node to its own shift weight), but it is
    // non-decreasing in every coordinate. Bound it per coordinate with
    // tables at mu_j = lo_j and mu_j = hi_j over the other axes; points the
    // bounds cannot decide get an exact dual-graph evaluation.
    std::vector<std::vector<double>> nu_lo(m), nu_hi(m);
    {
        std::vector<double> mu(m), am(m), nu(m);
        for (std::size_t j = 0; j < m; ++j) {
            std::size_t total = 1;
            for (std::size_t k = 0; k < m; ++k)
                if (k != j) total *= n[k];
            nu_lo[j].resize(total);
            nu_hi[j].resize(total);
            SlabIter it(n, j, 0);
            std::size_t idx = 0;
            while (!it.done) {
                for (std::size_t k = 0; k < m; ++k)
                    mu[k] = (k == j) ? axes[j].front() : axes[k][it.t[k]];
                engine.compute(mu, am.data(), nu.data());
                nu_lo[j][idx] = nu[j];
                mu[j] = axes[j].back();
                engine.compute(mu, am.data(), nu.data());
                nu_hi[j][idx] = nu[j];
                ++idx;
                it.advance();
            }
        }
    }

    auto tab_index = [&](std::size_t i, const std::vector<std::size_t>& t) {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < m; ++k)
            if (k != i) idx = idx * n[k] + t[k];
        return idx;
    };
    std::vector<double> mu_buf(m), am_buf(m), nu_buf(m);
    auto point_rejected = [&](const std::vector<std::size_t>& t) {
        bool ambiguous = false;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t idx = tab_index(i, t);
            if (stat[i][t[i]] <= alpha * nu_lo[i][idx]) return true;
            if (stat[i][t[i]] <= alpha * nu_hi[i][idx]) ambiguous = true;
        }
        if (!ambiguous) return false;
        for (std::size_t k = 0; k < m; ++k) mu_buf[k] = axes[k][t[k]];
        engine.compute(mu_buf, am_buf.data(), nu_buf.data());
        for (std::size_t i = 0; i < m; ++i)
            if (pval[i][t[i]] <= am_buf[i]) return true;
        return false;
    };

    BruteForceResult res;
    res.bounds.lower.assign(m, kNegInf);
    res.status.assign(m, BracketStatus::ok);

    for (std::size_t j = 0; j < m; ++j) {
        bool have_cache = false;
        std::vector<std::size_t> cache;
        std::size_t first_open = n[j]; // first slab containing a survivor
        for (std::size_t tj = 0; tj < n[j]; ++tj) {
            bool witness = false;
            if (have_cache) {
                cache[j] = tj;
                witness = !point_rejected(cache);
            }
            if (!witness) {
                SlabIter it(n, j, tj);
                while (!it.done) {
                    if (!point_rejected(it.t)) {
                        witness = true;
                        cache = it.t;
                        have_cache = true;
                        break;
                    }
                    it.advance();
                }
            }
            if (witness) {
                first_open = tj;
                break;
            }
        }
        if (first_open == 0) {
            res.status[j] = BracketStatus::hit_lower;
            res.bounds.lower[j] = grid.lo[j] - grid.step;
        } else if (first_open == n[j]) {
            res.status[j] = BracketStatus::hit_upper;
            res.bounds.lower[j] = grid.hi[j];
        } else {
            res.bounds.lower[j] = axes[j][first_open - 1];
        }
    }
    return res;
}

} // namespace isci
