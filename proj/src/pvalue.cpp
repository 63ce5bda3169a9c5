#include "isci/pvalue.hpp"

#include <cmath>
#include <stdexcept>

#include "isci/normal.hpp"

namespace isci {

namespace {
void check_model(const MarginalModel& m) {
    if (!std::isfinite(m.estimate))
        throw std::invalid_argument("MarginalModel: estimate must be finite");
    if (!(m.se > 0.0) || !std::isfinite(m.se))
        throw std::invalid_argument("MarginalModel: standard error must be positive and finite");
}
} // namespace

double shifted_pvalue(const MarginalModel& m, double mu) {
    check_model(m);
    if (std::isnan(mu)) throw std::invalid_argument("shifted_pvalue: mu is NaN");
    if (mu == kNegInf) return 0.0;
    if (mu == kPosInf) return 1.0;
    return normal_cdf((mu - m.estimate) / m.se); // == 1 - Phi((est - mu)/se)
}

double inverse_pvalue(const MarginalModel& m, double y) {
    check_model(m);
    if (!(y >= 0.0) || y >= 1.0)
        throw std::invalid_argument("inverse_pvalue: y must lie in [0,1)");
    if (y == 0.0) return kNegInf;
    // Phi^{-1}(1-y) = -Phi^{-1}(y); the lower-tail form keeps full
    // precision for tiny y.
    return m.estimate + m.se * normal_quantile(y);
}

std::vector<MarginalModel> apply_shift(const std::vector<MarginalModel>& models,
                                       const ShiftSpec& shifts) {
    if (!shifts.offset.empty() && shifts.offset.size() != models.size())
        throw std::invalid_argument("ShiftSpec: offset length does not match model count");
    std::vector<MarginalModel> out = models;
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double d = shifts.at(j);
        if (!std::isfinite(d)) throw std::invalid_argument("ShiftSpec: offsets must be finite");
        out[j].estimate += d;
    }
    return out;
}

} // namespace isci
