#include "isci/dual_graph.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "isci/pvalue.hpp"

namespace isci {

namespace {
std::string shifted_label(const std::string& base, double mu) {
    std::ostringstream os;
    os << base << "@";
    if (mu == kNegInf) {
        os << "-inf";
    } else {
        os.precision(6);
        os << mu;
    }
    return os.str();
}

void check_mu(const std::vector<double>& mu, std::size_t m) {
    if (mu.size() != m)
        throw std::invalid_argument("mu length does not match graph size");
    for (double x : mu)
        if (std::isnan(x) || x == kPosInf)
            throw std::invalid_argument("mu entries must be finite or -inf");
}
} // namespace

double shifted_node_weight(const HypothesisGraph& g, const InformationWeightSpec& w,
                           std::size_t j, double mu) {
    if (!(mu > 0.0)) return 1.0;
    return effective_weight(g.row_sum(j), w.value(j, mu));
}

DualGraph build_dual_graph(const HypothesisGraph& g, const std::vector<double>& mu,
                           const InformationWeightSpec& w) {
    require_valid(g);
    const std::size_t m = g.size();
    check_mu(mu, m);
    w.validate(m);

    std::size_t extra = 0;
    for (double x : mu)
        if (x > 0.0) ++extra;
    const std::size_t n = m + extra;

    DualGraph d;
    d.graph.alpha = g.alpha;
    d.graph.labels.resize(n);
    d.graph.initial_levels.assign(n, 0.0);
    d.graph.transitions.assign(n * n, 0.0);
    d.shifted_node.resize(m);
    d.base_of.resize(n);

    // Base positions first, appended shifted nodes after, in index order.
    std::size_t next = m;
    for (std::size_t j = 0; j < m; ++j) {
        d.graph.initial_levels[j] = g.initial_levels[j];
        d.base_of[j] = j;
        if (mu[j] > 0.0) {
            d.graph.labels[j] = g.labels[j];
            d.shifted_node[j] = next;
            d.graph.labels[next] = shifted_label(g.labels[j], mu[j]);
            d.base_of[next] = j;
            d.null_nodes.push_back(j);
            ++next;
        } else {
            d.graph.labels[j] = shifted_label(g.labels[j], mu[j]);
            d.shifted_node[j] = j;
        }
    }

    for (std::size_t j = 0; j < m; ++j) {
        if (!(mu[j] > 0.0)) continue; // outgoing arrows deleted
        const double qv = w.value(j, mu[j]);
        for (std::size_t l = 0; l < m; ++l)
            d.graph.g(j, l) = g.g(j, l) * (1.0 - qv);
        d.graph.g(j, d.shifted_node[j]) = effective_weight(g.row_sum(j), qv);
    }
    return d;
}

LocalLevels local_levels(const HypothesisGraph& g, const std::vector<double>& mu,
                         const InformationWeightSpec& w) {
    const DualGraph d = build_dual_graph(g, mu, w);
    GraphState s = GraphState::from(d.graph);
    for (std::size_t j : d.null_nodes) reject_node_inplace(s, j);

    const std::size_t m = g.size();
    LocalLevels out;
    out.alpha_mu.resize(m);
    out.nu.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double a = s.levels[d.shifted_node[j]];
        out.alpha_mu[j] = a;
        out.nu[j] = a / (g.alpha * shifted_node_weight(g, w, j, mu[j]));
    }
    return out;
}

LevelEngine::LevelEngine(const HypothesisGraph& g, const InformationWeightSpec& w)
    : base_(&g), weights_(&w), m_(g.size()) {
    require_valid(g);
    w.validate(m_);
    row_sums_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) row_sums_[i] = g.row_sum(i);
    const std::size_t n = 2 * m_;
    levels_.resize(n);
    trans_.resize(n * n);
    wvals_.resize(m_);
    shifted_.resize(m_);
    alive_.resize(n);
}

void LevelEngine::compute(const std::vector<double>& mu, double* alpha_mu, double* nu) {
    const std::size_t m = m_;
    if (mu.size() != m)
        throw std::invalid_argument("LevelEngine: mu length does not match graph size");

    std::size_t n = m;
    for (std::size_t j = 0; j < m; ++j) {
        if (std::isnan(mu[j]) || mu[j] == kPosInf)
            throw std::invalid_argument("LevelEngine: mu entries must be finite or -inf");
        shifted_[j] = (mu[j] > 0.0) ? n++ : j;
    }

    std::fill(trans_.begin(), trans_.begin() + n * n, 0.0);
    std::fill(alive_.begin(), alive_.begin() + n, std::uint8_t{1});
    for (std::size_t j = 0; j < m; ++j) levels_[j] = base_->initial_levels[j];
    std::fill(levels_.begin() + m, levels_.begin() + n, 0.0);

    for (std::size_t j = 0; j < m; ++j) {
        if (!(mu[j] > 0.0)) {
            wvals_[j] = 1.0;
            continue;
        }
        const double qv = weights_->value(j, mu[j]);
        for (std::size_t l = 0; l < m; ++l)
            trans_[j * n + l] = base_->g(j, l) * (1.0 - qv);
        wvals_[j] = effective_weight(row_sums_[j], qv);
        trans_[j * n + shifted_[j]] = wvals_[j];
    }

    // Step two: reject every original null node, ascending order.
    for (std::size_t i = 0; i < m; ++i) {
        if (!(mu[i] > 0.0)) continue;
        const double ai = levels_[i];
        for (std::size_t j = 0; j < n; ++j)
            if (alive_[j] && j != i) levels_[j] += ai * trans_[i * n + j];
        levels_[i] = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!alive_[j] || j == i) continue;
            const double gji = trans_[j * n + i];
            if (gji == 0.0) continue;
            const double gij = trans_[i * n + j];
            const double loop = gji * gij;
            for (std::size_t l = 0; l < n; ++l) {
                if (!alive_[l] || l == j || l == i) continue;
                trans_[j * n + l] = (loop != 1.0)
                                        ? (trans_[j * n + l] + gji * trans_[i * n + l]) / (1.0 - loop)
                                        : 0.0;
            }
            trans_[j * n + i] = 0.0;
        }
        for (std::size_t k = 0; k < n; ++k) trans_[i * n + k] = 0.0;
        alive_[i] = 0;
    }

    const double a = base_->alpha;
    for (std::size_t j = 0; j < m; ++j) {
        alpha_mu[j] = levels_[shifted_[j]];
        nu[j] = alpha_mu[j] / (a * wvals_[j]);
    }
}

} // namespace isci
