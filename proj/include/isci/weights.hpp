#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace isci {

// Information weight functions Q_j(mu) steering the trade-off between
// sharp bounds (q near 1) and many rejections (q near 0). Q_j is 1 on
// mu <= 0, positive, non-increasing and continuous. The default family is
// Q_j(mu) = q_j^(mu v 0); q = 1 is the weighted-Bonferroni boundary case.
class InformationWeightSpec {
public:
    static InformationWeightSpec uniform(double q);
    static InformationWeightSpec per_hypothesis(std::vector<double> qs);
    static InformationWeightSpec general(std::vector<std::function<double(double)>> fs);

    // Q_j(mu v 0); mu = -inf is the mu <= 0 branch.
    double value(std::size_t j, double mu) const;

    // Throws std::invalid_argument if the spec cannot serve m hypotheses
    // or a weight lies outside (0,1]. General functions are spot-checked
    // at sample points.
    void validate(std::size_t m) const;

    bool is_uniform() const { return fs_.empty() && qs_.size() == 1; }
    double uniform_q() const { return qs_.at(0); }

private:
    std::vector<double> qs_;                             // power family
    std::vector<std::function<double(double)>> fs_;      // general family
};

// Transfer weight to the shifted node: 1 - (1 - Q)(row sum).
// Reduces to Q for complete rows and to 1 for all-zero rows or mu <= 0.
double effective_weight(double base_row_sum, double q_value);

} // namespace isci
