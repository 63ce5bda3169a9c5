#pragma once

namespace isci {

// Standard normal CDF, accurate to ~1 ulp over the full double range.
double normal_cdf(double x);

// Standard normal quantile. p in [0,1]; the endpoints map to -inf/+inf.
// Accurate to ~1 ulp in both tails.
double normal_quantile(double p);

} // namespace isci
