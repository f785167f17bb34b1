#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "powvar/rng.hpp"
#include "powvar/stats.hpp"

#include "oracles.hpp"

using namespace powvar;

TEST_CASE("ks distance at exact normal quantiles is 0.5/M") {
    const std::size_t m = 64;
    std::vector<double> samples(m);
    for (std::size_t i = 0; i < m; ++i)
        samples[i] = oracles::normal_quantile((i + 0.5) / static_cast<double>(m));
    const auto result = stats::ks_distance(samples);
    CHECK(result.distance == doctest::Approx(0.5 / m).epsilon(1e-9));
}

TEST_CASE("ks distance of a point mass at zero is one half") {
    std::vector<double> zeros(100, 0.0);
    CHECK(stats::ks_distance(zeros).distance == doctest::Approx(0.5));
}

TEST_CASE("ks needs at least 8 samples") {
    std::vector<double> few(7, 0.1);
    CHECK_THROWS(stats::ks_distance(few));
}

TEST_CASE("ks p-values are roughly uniform under the null") {
    Rng rng(2024);
    const int reps = 400;
    int below_10 = 0, below_50 = 0;
    double mean_p = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<double> z(1000);
        for (double& v : z) v = rng.normal();
        const double p = stats::ks_distance(z).p_value;
        mean_p += p;
        if (p < 0.10) ++below_10;
        if (p < 0.50) ++below_50;
    }
    mean_p /= reps;
    CHECK(mean_p > 0.42);
    CHECK(mean_p < 0.58);
    CHECK(below_10 > reps * 0.04);
    CHECK(below_10 < reps * 0.18);
    CHECK(below_50 > reps * 0.40);
    CHECK(below_50 < reps * 0.60);
}

TEST_CASE("kolmogorov survival sanity") {
    // classical values: survival(0.8276) ~ 0.5 ; survival(1.2238) ~ 0.1
    CHECK(stats::kolmogorov_survival(0.82757) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(stats::kolmogorov_survival(1.22385) == doctest::Approx(0.1).epsilon(1e-3));
    CHECK(stats::kolmogorov_survival(0.0) == 1.0);
    CHECK(stats::kolmogorov_survival(0.05) == doctest::Approx(1.0).epsilon(1e-9));
    // the two series forms agree at the switch point (offsets far below the
    // local derivative scale)
    CHECK(stats::kolmogorov_survival(1.0 - 1e-12) ==
          doctest::Approx(stats::kolmogorov_survival(1.0 + 1e-12)).epsilon(1e-9));
}

TEST_CASE("line fit recovers a known slope") {
    std::vector<double> x, y;
    for (int i = 0; i < 9; ++i) {
        x.push_back(i);
        y.push_back(3.0 - 0.5 * i);
    }
    const auto fit = stats::fit_line(x, y);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.degenerate);  // zero residuals flagged

    Rng rng(8);
    std::vector<double> noisy(y);
    for (double& v : noisy) v += 0.01 * rng.normal();
    const auto fit2 = stats::fit_line(x, noisy);
    CHECK_FALSE(fit2.degenerate);
    CHECK(fit2.slope == doctest::Approx(-0.5).epsilon(0.05));
    CHECK(fit2.slope_stderr > 0.0);
    CHECK(fit2.slope_stderr < 0.01);
}

TEST_CASE("compensated summation survives cancellation") {
    stats::CompensatedSum acc;
    acc.add(1e16);
    for (int i = 0; i < 10; ++i) acc.add(1.0);
    acc.add(-1e16);
    CHECK(acc.value() == doctest::Approx(10.0));
}

TEST_CASE("moment helpers") {
    const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    CHECK(stats::mean(v) == doctest::Approx(2.5));
    CHECK(stats::variance(v) == doctest::Approx(5.0 / 3.0));
    const std::vector<double> w = {2.0, 4.0, 6.0, 8.0};
    CHECK(stats::covariance(v, w) == doctest::Approx(2.0 * 5.0 / 3.0));
}

TEST_CASE("normal cdf") {
    CHECK(stats::normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(stats::normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-8));
    CHECK(stats::normal_cdf(-8.0) < 1e-14);
}
