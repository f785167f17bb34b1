#include "powvar/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace powvar::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

double kolmogorov_survival(double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 10.0) return 0.0;
    if (x < 1.0) {
        // dual theta series, accurate where the alternating form converges slowly
        const double pi = 3.14159265358979323846;
        double cdf = 0.0;
        for (int k = 1; k <= 100; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double term = std::exp(-odd * odd * pi * pi / (8.0 * x * x));
            cdf += term;
            if (term < 1e-18) break;
        }
        cdf *= std::sqrt(2.0 * pi) / x;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double survival = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        survival += 2.0 * sign * term;
        sign = -sign;
        if (term < 1e-18) break;
    }
    return std::clamp(survival, 0.0, 1.0);
}

KsResult ks_distance(std::span<const double> samples) {
    if (samples.size() < 8) throw std::invalid_argument("ks_distance: need at least 8 samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = normal_cdf(sorted[i]);
        d = std::max(d, std::max((i + 1.0) / n - cdf, cdf - i / n));
    }
    KsResult result;
    result.distance = d;
    result.p_value = kolmogorov_survival(std::sqrt(n) * d);
    return result;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    LineFit fit;
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("fit_line: need matching x/y, >= 2 points");
    const double xbar = mean(x);
    const double ybar = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: x values are all equal");
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    if (n < 3) {
        fit.degenerate = true;
        return fit;
    }
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double resid = y[i] - fit.intercept - fit.slope * x[i];
        rss += resid * resid;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2) / sxx);
    fit.degenerate = rss <= 1e-24 * n;
    return fit;
}

void CompensatedSum::add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value))
        compensation_ += (sum_ - t) + value;
    else
        compensation_ += (value - t) + sum_;
    sum_ = t;
}

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    CompensatedSum acc;
    for (double v : values) acc.add(v);
    return acc.value() / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("variance: need >= 2 samples");
    const double m = mean(values);
    CompensatedSum acc;
    for (double v : values) acc.add((v - m) * (v - m));
    return acc.value() / static_cast<double>(values.size() - 1);
}

double covariance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("covariance: need matching spans with >= 2 samples");
    const double ma = mean(a);
    const double mb = mean(b);
    CompensatedSum acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc.add((a[i] - ma) * (b[i] - mb));
    return acc.value() / static_cast<double>(a.size() - 1);
}

}  // namespace powvar::stats
