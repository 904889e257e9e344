#pragma once

#include <cmath>
#include <numbers>

namespace dronex {

// Standard normal CDF. erfc keeps full double precision in both tails.
inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Inverse CDF by bisection on normal_cdf; plenty accurate and only used in
// per-node planning, never in inner loops.
inline double normal_quantile(double p) {
    if (p <= 0) return -1e18;
    if (p >= 1) return 1e18;
    double lo = -40, hi = 40;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace dronex
