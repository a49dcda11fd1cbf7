#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace forgan::oracle {

// Direct evaluation of Knuth's log-posterior with its own counting loop.
inline double knuth_log_posterior(const std::vector<double>& x, std::size_t m) {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    std::vector<double> counts(m, 0.0);
    for (double v : x) {
        auto k = static_cast<std::size_t>(std::floor((v - *lo) / (*hi - *lo) * static_cast<double>(m)));
        counts[std::min(k, m - 1)] += 1.0;
    }
    const double n = static_cast<double>(x.size());
    const double md = static_cast<double>(m);
    double f = n * std::log(md) + std::lgamma(md / 2) - md * std::lgamma(0.5) - std::lgamma(n + md / 2);
    for (double c : counts) f += std::lgamma(c + 0.5);
    return f;
}

}  // namespace forgan::oracle
