#include "sysid/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sysid {

WilsonInterval wilson_interval(long long successes, long long n, double z) {
    if (n < 1) throw std::invalid_argument("wilson_interval: n must be >= 1");
    if (successes < 0 || successes > n)
        throw std::invalid_argument("wilson_interval: successes out of range");
    const double p = static_cast<double>(successes) / n;
    const double z2n = z * z / n;
    const double center = (p + z2n / 2.0) / (1.0 + z2n);
    const double half =
        (z / (1.0 + z2n)) * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * double(n) * n));
    WilsonInterval w;
    w.low = std::max(0.0, center - half);
    w.high = std::min(1.0, center + half);
    w.half_width = half;
    return w;
}

double order_statistic_quantile(std::vector<double> values, double q) {
    if (values.empty())
        throw std::invalid_argument("order_statistic_quantile: empty sample");
    if (q <= 0.0 || q > 1.0)
        throw std::invalid_argument("order_statistic_quantile: q must lie in (0,1]");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<long long>(values.size());
    long long k = static_cast<long long>(std::ceil(q * n));
    k = std::clamp(k, 1LL, n);
    return values[k - 1];
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_slope: need two same-length samples");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace sysid
