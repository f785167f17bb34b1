#pragma once

#include <span>
#include <vector>

namespace powvar::stats {

double normal_cdf(double x);

// One-sample Kolmogorov-Smirnov distance of the samples to N(0,1), with the
// asymptotic p-value (Kolmogorov series, <= 100 terms).  Needs >= 8 samples.
struct KsResult {
    double distance = 0.0;
    double p_value = 1.0;
};

KsResult ks_distance(std::span<const double> samples);

// Survival function of the Kolmogorov distribution at x = sqrt(n) * D.
double kolmogorov_survival(double x);

// Least-squares line fit with slope standard error.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    bool degenerate = false;  // < 3 points or residual variance ~ 0
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Neumaier compensated summation; order-dependent only through the index
// order the caller feeds it, which we keep fixed.
class CompensatedSum {
  public:
    void add(double value);
    double value() const { return sum_ + compensation_; }

  private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

double mean(std::span<const double> values);
double variance(std::span<const double> values);  // unbiased, needs >= 2
double covariance(std::span<const double> a, std::span<const double> b);

}  // namespace powvar::stats
