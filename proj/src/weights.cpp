#include "isci/weights.hpp"

#include <cmath>
#include <stdexcept>

#include "isci/pvalue.hpp"

namespace isci {

InformationWeightSpec InformationWeightSpec::uniform(double q) {
    InformationWeightSpec w;
    w.qs_ = {q};
    return w;
}

InformationWeightSpec InformationWeightSpec::per_hypothesis(std::vector<double> qs) {
    InformationWeightSpec w;
    w.qs_ = std::move(qs);
    return w;
}

InformationWeightSpec InformationWeightSpec::general(std::vector<std::function<double(double)>> fs) {
    InformationWeightSpec w;
    w.fs_ = std::move(fs);
    return w;
}

double InformationWeightSpec::value(std::size_t j, double mu) const {
    if (std::isnan(mu)) throw std::invalid_argument("information weight: mu is NaN");
    if (!(mu > 0.0)) return 1.0;
    if (!fs_.empty()) {
        const double v = fs_.at(j)(mu);
        if (!(v > 0.0) || v > 1.0 || !std::isfinite(v))
            throw std::runtime_error("information weight function left (0,1]");
        return v;
    }
    const double q = qs_.size() == 1 ? qs_[0] : qs_.at(j);
    if (q == 1.0) return 1.0;
    const double v = std::pow(q, mu);
    if (!(v > 0.0))
        throw std::runtime_error("information weight underflow: q^mu is not representable");
    return v;
}

void InformationWeightSpec::validate(std::size_t m) const {
    if (!fs_.empty()) {
        if (fs_.size() != m)
            throw std::invalid_argument("information weights: function count does not match m");
        for (std::size_t j = 0; j < m; ++j) {
            const auto& f = fs_[j];
            if (!f) throw std::invalid_argument("information weights: missing function");
            double prev = 1.0 + 1e-12;
            for (double x : {0.0, 0.5, 1.0, 2.0, 5.0}) {
                const double v = f(x);
                if (!(v > 0.0) || v > 1.0 || !std::isfinite(v))
                    throw std::invalid_argument("information weights: Q_j must map into (0,1]");
                if (v > prev + 1e-12)
                    throw std::invalid_argument("information weights: Q_j must be non-increasing");
                prev = v;
            }
            if (std::fabs(f(0.0) - 1.0) > 1e-12)
                throw std::invalid_argument("information weights: Q_j(0) must equal 1");
        }
        return;
    }
    if (qs_.empty())
        throw std::invalid_argument("information weights: empty spec");
    if (qs_.size() != 1 && qs_.size() != m)
        throw std::invalid_argument("information weights: q count does not match m");
    for (double q : qs_)
        if (!(q > 0.0) || q > 1.0 || !std::isfinite(q))
            throw std::invalid_argument("information weights: q must lie in (0,1]");
}

double effective_weight(double base_row_sum, double q_value) {
    return 1.0 - (1.0 - q_value) * base_row_sum;
}

} // namespace isci
