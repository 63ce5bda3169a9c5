#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace isci {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Normal marginal for one hypothesis H: theta <= 0 on the working scale.
// The estimate and its known standard error induce the shifted p-value
// family p(mu) for the hypotheses H^mu: theta <= mu.
struct MarginalModel {
    double estimate = 0.0;
    double se = 1.0;
};

// p(mu) = 1 - Phi((estimate - mu)/se). Strictly increasing and continuous
// in mu with limits 0 at -inf and 1 at +inf; strictly decreasing in the
// estimate for fixed mu.
double shifted_pvalue(const MarginalModel& m, double mu);

// Inverse of shifted_pvalue: the mu with p(mu) = y, for y in [0,1).
// y = 0 maps to -inf.
double inverse_pvalue(const MarginalModel& m, double y);

// Per-hypothesis coordinate shift mapping each tested null border to 0
// (non-inferiority margins). Bounds computed on the working scale are
// reported on the original scale by subtracting the offset.
struct ShiftSpec {
    std::vector<double> offset; // empty = no shift anywhere

    double at(std::size_t j) const {
        return offset.empty() ? 0.0 : offset.at(j);
    }
    bool trivial() const { return offset.empty(); }
};

// Models re-centred on the working scale (estimate + offset).
std::vector<MarginalModel> apply_shift(const std::vector<MarginalModel>& models,
                                       const ShiftSpec& shifts);

} // namespace isci
