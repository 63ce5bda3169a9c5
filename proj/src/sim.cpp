#include "isci/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "isci/normal.hpp"

namespace isci {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t rep) {
    return splitmix64(splitmix64(seed) ^ splitmix64(0x5851F42D4C957F2DULL * (rep + 1)));
}

// Uniform in (0,1) from the top 53 bits; inverse-CDF normal keeps the
// draw sequence independent of libstdc++ distribution internals.
double uniform01(std::mt19937_64& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

void check_scenario(const Scenario& s) {
    require_valid(s.graph);
    const std::size_t m = s.graph.size();
    s.weights.validate(m);
    if (s.true_theta.size() != m || s.se.size() != m)
        throw std::invalid_argument("scenario: theta/se length does not match graph size");
    if (!s.shifts.offset.empty() && s.shifts.offset.size() != m)
        throw std::invalid_argument("scenario: shift length does not match graph size");
    if (s.correlation.size() != m * m)
        throw std::invalid_argument("scenario: correlation matrix is not m x m");
    for (double v : s.se)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("scenario: standard errors must be positive");
    if (s.n_sims < 1) throw std::invalid_argument("scenario: n_sims must be >= 1");
    cholesky_lower(s.correlation, m);
}

void parallel_chunks(std::size_t n, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& body) {
    unsigned t = threads ? threads : std::thread::hardware_concurrency();
    if (t == 0) t = 1;
    t = static_cast<unsigned>(std::min<std::size_t>(t, n));
    if (t <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    const std::size_t chunk = (n + t - 1) / t;
    for (unsigned k = 0; k < t; ++k) {
        const std::size_t b = k * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back(body, b, e);
    }
    for (auto& th : pool) th.join();
}

struct RawBounds {
    // row-major n_sims x m, original scale; NaN marks a failed replication
    std::vector<double> isci;
    std::vector<double> csci;
    std::vector<std::uint8_t> isci_ok, csci_ok, converged;
    std::size_t m = 0;
};

RawBounds simulate_all(const Scenario& s, unsigned threads, bool want_csci) {
    check_scenario(s);
    const std::size_t m = s.graph.size();
    const std::size_t n = s.n_sims;
    const std::vector<double> chol = cholesky_lower(s.correlation, m);

    RawBounds raw;
    raw.m = m;
    raw.isci.assign(n * m, 0.0);
    raw.isci_ok.assign(n, 0);
    raw.converged.assign(n, 0);
    if (want_csci) {
        raw.csci.assign(n * m, 0.0);
        raw.csci_ok.assign(n, 0);
    }

    SolveOptions opt;
    opt.eps = s.eps;
    opt.max_iter = s.max_iter;
    opt.record_trace = false;

    parallel_chunks(n, threads, [&](std::size_t b, std::size_t e) {
        std::vector<double> z(m), theta(m);
        std::vector<MarginalModel> models(m);
        for (std::size_t r = b; r < e; ++r) {
            std::mt19937_64 eng(stream_seed(s.seed, r));
            for (std::size_t k = 0; k < m; ++k) z[k] = normal_quantile(uniform01(eng));
            for (std::size_t i = 0; i < m; ++i) {
                double acc = 0.0;
                for (std::size_t k = 0; k <= i; ++k) acc += chol[i * m + k] * z[k];
                theta[i] = s.true_theta[i] + s.se[i] * acc;
                models[i] = MarginalModel{theta[i], s.se[i]};
            }
            try {
                const BoundsComputation bc =
                    compute_bounds(s.graph, models, s.weights, s.shifts, opt);
                std::copy(bc.bounds.lower.begin(), bc.bounds.lower.end(),
                          raw.isci.begin() + static_cast<std::ptrdiff_t>(r * m));
                raw.isci_ok[r] = 1;
                raw.converged[r] = bc.trace.converged ? 1 : 0;
            } catch (const std::exception&) {
                raw.isci_ok[r] = 0;
            }
            if (want_csci) {
                try {
                    const BoundsVector cb = compatible_sci(s.graph, models, s.shifts);
                    std::copy(cb.lower.begin(), cb.lower.end(),
                              raw.csci.begin() + static_cast<std::ptrdiff_t>(r * m));
                    raw.csci_ok[r] = 1;
                } catch (const std::exception&) {
                    raw.csci_ok[r] = 0;
                }
            }
        }
    });
    return raw;
}

MethodMetrics aggregate(const Scenario& s, const std::vector<double>& L,
                        const std::vector<std::uint8_t>& ok) {
    const std::size_t m = s.graph.size();
    const std::size_t n = s.n_sims;
    MethodMetrics mm;
    mm.power.assign(m, 0.0);
    mm.mean_bound_finite.assign(m, 0.0);
    mm.mean_bound_rejected.assign(m, 0.0);
    mm.pct_finite.assign(m, 0.0);
    std::vector<std::size_t> n_fin(m, 0), n_rej(m, 0);
    std::size_t n_ok = 0, n_cov = 0;

    for (std::size_t r = 0; r < n; ++r) {
        if (!ok[r]) continue;
        ++n_ok;
        bool covered = true;
        for (std::size_t j = 0; j < m; ++j) {
            const double lj = L[r * m + j];
            const double border = -s.shifts.at(j);
            if (lj >= border) {
                ++n_rej[j];
                mm.mean_bound_rejected[j] += lj;
            }
            if (lj != kNegInf) {
                ++n_fin[j];
                mm.mean_bound_finite[j] += lj;
            }
            if (!(s.true_theta[j] > lj)) covered = false;
        }
        if (covered) ++n_cov;
    }

    const double nn = n_ok ? static_cast<double>(n_ok) : 1.0;
    for (std::size_t j = 0; j < m; ++j) {
        mm.power[j] = static_cast<double>(n_rej[j]) / nn;
        mm.pct_finite[j] = static_cast<double>(n_fin[j]) / nn;
        mm.mean_bound_finite[j] =
            n_fin[j] ? mm.mean_bound_finite[j] / static_cast<double>(n_fin[j])
                     : std::numeric_limits<double>::quiet_NaN();
        mm.mean_bound_rejected[j] =
            n_rej[j] ? mm.mean_bound_rejected[j] / static_cast<double>(n_rej[j])
                     : std::numeric_limits<double>::quiet_NaN();
    }
    mm.coverage = static_cast<double>(n_cov) / nn;
    return mm;
}

} // namespace

std::vector<double> cholesky_lower(const std::vector<double>& corr, std::size_t m) {
    if (corr.size() != m * m)
        throw std::invalid_argument("cholesky: matrix is not m x m");
    for (std::size_t i = 0; i < m; ++i) {
        if (std::fabs(corr[i * m + i] - 1.0) > 1e-9)
            throw std::invalid_argument("cholesky: correlation diagonal must be 1");
        for (std::size_t j = 0; j < i; ++j)
            if (std::fabs(corr[i * m + j] - corr[j * m + i]) > 1e-12)
                throw std::invalid_argument("cholesky: correlation must be symmetric");
    }
    std::vector<double> L(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = corr[i * m + j];
            for (std::size_t k = 0; k < j; ++k) acc -= L[i * m + k] * L[j * m + k];
            if (i == j) {
                if (!(acc > 0.0))
                    throw std::invalid_argument("cholesky: matrix is not positive definite");
                L[i * m + i] = std::sqrt(acc);
            } else {
                L[i * m + j] = acc / L[j * m + j];
            }
        }
    }
    return L;
}

std::vector<double> sample_estimates(const Scenario& s, std::uint64_t replication) {
    check_scenario(s);
    const std::size_t m = s.graph.size();
    const std::vector<double> chol = cholesky_lower(s.correlation, m);
    std::mt19937_64 eng(stream_seed(s.seed, replication));
    std::vector<double> z(m), theta(m);
    for (std::size_t k = 0; k < m; ++k) z[k] = normal_quantile(uniform01(eng));
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k <= i; ++k) acc += chol[i * m + k] * z[k];
        theta[i] = s.true_theta[i] + s.se[i] * acc;
    }
    return theta;
}

ScenarioResult run_scenario(const Scenario& s, unsigned threads) {
    const RawBounds raw = simulate_all(s, threads, true);
    ScenarioResult res;
    res.isci = aggregate(s, raw.isci, raw.isci_ok);
    res.csci = aggregate(s, raw.csci, raw.csci_ok);
    for (std::size_t r = 0; r < s.n_sims; ++r) {
        if (!raw.isci_ok[r] || !raw.csci_ok[r]) ++res.solver_failures;
        if (raw.isci_ok[r] && !raw.converged[r]) ++res.nonconverged;
    }
    return res;
}

double calibrate_information_weight(double target_alpha_local, double alpha_local,
                                    double delta) {
    if (!(alpha_local > 0.0) || alpha_local >= 1.0)
        throw std::invalid_argument("calibrate: alpha_local must lie in (0,1)");
    if (!(target_alpha_local > 0.0) || target_alpha_local > alpha_local)
        throw std::invalid_argument("calibrate: target must lie in (0, alpha_local]");
    if (!(delta > 0.0)) throw std::invalid_argument("calibrate: delta must be positive");
    return std::pow(target_alpha_local / alpha_local, 1.0 / delta);
}

double design_information(double alpha_local, double beta, double delta_n) {
    if (!(alpha_local > 0.0) || alpha_local >= 1.0 || !(beta > 0.0) || beta >= 1.0)
        throw std::invalid_argument("design: probabilities must lie in (0,1)");
    if (!(delta_n > 0.0)) throw std::invalid_argument("design: delta must be positive");
    const double za = normal_quantile(1.0 - alpha_local);
    const double zb = normal_quantile(1.0 - beta);
    return (za + zb) * (za + zb) / (delta_n * delta_n);
}

double design_alpha_for_effect(double information, double beta, double delta_e) {
    if (!(information > 0.0)) throw std::invalid_argument("design: information must be positive");
    if (!(beta > 0.0) || beta >= 1.0)
        throw std::invalid_argument("design: beta must lie in (0,1)");
    const double zb = normal_quantile(1.0 - beta);
    return 1.0 - normal_cdf(delta_e * std::sqrt(information) - zb);
}

std::vector<TradeOffRow> trade_off_curve(const Scenario& base,
                                         const std::vector<double>& q_grid,
                                         unsigned threads) {
    std::vector<TradeOffRow> rows;
    rows.reserve(q_grid.size());
    for (double q : q_grid) {
        Scenario s = base;
        s.weights = InformationWeightSpec::uniform(q);
        const RawBounds raw = simulate_all(s, threads, false);
        const std::size_t m = raw.m;

        double sum_b = 0.0, sum_b2 = 0.0;
        std::size_t n_b = 0;
        double sum_r = 0.0, sum_r2 = 0.0;
        std::size_t n_ok = 0;
        for (std::size_t r = 0; r < s.n_sims; ++r) {
            if (!raw.isci_ok[r]) continue;
            ++n_ok;
            std::size_t rej = 0;
            for (std::size_t j = 0; j < m; ++j) {
                const double lj = raw.isci[r * m + j];
                if (lj >= -s.shifts.at(j)) {
                    ++rej;
                    sum_b += lj;
                    sum_b2 += lj * lj;
                    ++n_b;
                }
            }
            sum_r += static_cast<double>(rej);
            sum_r2 += static_cast<double>(rej) * static_cast<double>(rej);
        }

        TradeOffRow row;
        row.q = q;
        row.failures = s.n_sims - n_ok;
        if (n_b > 0) {
            row.mean_bound_rejected = sum_b / static_cast<double>(n_b);
            const double var =
                std::max(0.0, sum_b2 / static_cast<double>(n_b) -
                                  row.mean_bound_rejected * row.mean_bound_rejected);
            row.se_bound = std::sqrt(var / static_cast<double>(n_b));
        } else {
            row.mean_bound_rejected = std::numeric_limits<double>::quiet_NaN();
            row.se_bound = std::numeric_limits<double>::quiet_NaN();
        }
        const double nn = n_ok ? static_cast<double>(n_ok) : 1.0;
        row.mean_rejections = sum_r / nn;
        const double var_r =
            std::max(0.0, sum_r2 / nn - row.mean_rejections * row.mean_rejections);
        row.se_rejections = std::sqrt(var_r / nn);
        rows.push_back(row);
    }
    return rows;
}

} // namespace isci
