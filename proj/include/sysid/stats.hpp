#pragma once

#include <vector>

namespace sysid {

struct WilsonInterval {
    double low = 0.0;
    double high = 0.0;
    double half_width = 0.0;
};

// Wilson score interval for a binomial proportion; z defaults to the
// 95% two-sided normal quantile. For successes = 0 the lower end is
// exactly 0, and for successes = n the upper end is exactly 1.
WilsonInterval wilson_interval(long long successes, long long n,
                               double z = 1.959963984540054);

// Empirical quantile of order q as the ceil(q*n)-th order statistic
// (1-indexed); conservative for tail probabilities.
double order_statistic_quantile(std::vector<double> values, double q);

// Slope of the least-squares line through (x_i, y_i).
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sysid
