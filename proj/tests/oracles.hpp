#pragma once

// Test-only oracles, independent of the library's quadrature/closed-form
// paths: tanh-sinh quadrature (endpoint-singularity proof) and a normal
// quantile by bisection.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

// tanh-sinh quadrature on (a, b); handles integrable endpoint singularities
// like |x|^r at a cusp endpoint.
inline double tanh_sinh(const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double pi_half = 1.5707963267948966;
    double total = 0.0;
    const double h = 1.0 / 64.0;
    for (int k = -2200; k <= 2200; ++k) {
        const double t = k * h;
        const double u = pi_half * std::sinh(t);
        const double x = std::tanh(u);
        const double w = pi_half * std::cosh(t) / std::pow(std::cosh(u), 2);
        const double point = mid + half * x;
        if (point <= a || point >= b) continue;
        const double fx = f(point);
        if (std::isfinite(fx)) total += w * fx;
    }
    return total * half * h;
}

// E|U|^r for U ~ N(0,1), via tanh-sinh on (0, 40).
inline double abs_moment_oracle(double r) {
    auto integrand = [r](double x) { return std::pow(x, r) * std::exp(-0.5 * x * x); };
    return 2.0 * tanh_sinh(integrand, 0.0, 40.0) / std::sqrt(2.0 * 3.14159265358979323846);
}

// E[g(Z)] for Z ~ N(0, sigma^2), tanh-sinh per panel; pass every kink or
// discontinuity of g as a breakpoint so it lands at a panel endpoint.
inline double gaussian_expectation_oracle(const std::function<double(double)>& g, double sigma,
                                          std::vector<double> breakpoints = {}) {
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * 3.14159265358979323846));
    auto weighted = [&](double x) {
        const double z = x / sigma;
        return g(x) * norm * std::exp(-0.5 * z * z);
    };
    const double span = 40.0 * sigma;
    breakpoints.push_back(-span);
    breakpoints.push_back(0.0);
    breakpoints.push_back(span);
    std::sort(breakpoints.begin(), breakpoints.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double lo = std::max(breakpoints[i], -span);
        const double hi = std::min(breakpoints[i + 1], span);
        if (hi > lo) total += tanh_sinh(weighted, lo, hi);
    }
    return total;
}

inline double normal_quantile(double p) {
    double lo = -12.0, hi = 12.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
        (cdf < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracles
