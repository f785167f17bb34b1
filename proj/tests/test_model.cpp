#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "powvar/functions.hpp"
#include "powvar/model.hpp"
#include "powvar/rng.hpp"

using namespace powvar;

namespace {

bool report_mentions(const ValidationReport& report, const std::string& needle) {
    const auto all = report.all();
    return std::any_of(all.begin(), all.end(),
                       [&needle](const std::string& s) { return s.find(needle) != std::string::npos; });
}

ModelSpec bm(double sigma) {
    ModelSpec spec;
    spec.vol = VolSpec::constant(sigma);
    return spec;
}

}  // namespace

TEST_CASE("validation examples") {
    CHECK(report_mentions(validate_model(bm(0.0)), "sigma0 must be > 0"));

    ModelSpec stable = bm(0.5);
    stable.jumps = JumpSpec::stable_like(2.5, 0.1);
    CHECK(report_mentions(validate_model(stable), "beta must be in (0,2)"));

    CHECK(validate_model(bm(0.5)).valid());
}

TEST_CASE("degenerate sigma0 = 0 is reported but stays simulable") {
    const ValidationReport report = validate_model(bm(0.0));
    CHECK_FALSE(report.valid());
    CHECK(report.simulable());
    CHECK(report.errors.empty());

    ModelSpec negative = bm(-1.0);
    CHECK_FALSE(validate_model(negative).simulable());
}

TEST_CASE("activity index") {
    ModelSpec cp = bm(0.5);
    cp.jumps = JumpSpec::compound_poisson(2.0, JumpSizeSpec::fixed(1.0));
    CHECK(activity_index(cp) == 0.0);

    ModelSpec stable = bm(0.5);
    stable.jumps = JumpSpec::stable_like(1.2, 0.05);
    CHECK(activity_index(stable) == doctest::Approx(1.2));

    CHECK(activity_index(bm(0.5)) == 0.0);

    ModelSpec bad = bm(-1.0);
    CHECK_THROWS(activity_index(bad));
}

TEST_CASE("hypothesis profile: continuous model satisfies everything") {
    const HypothesisProfile profile = hypothesis_profile(bm(0.5));
    CHECK(profile.h);
    CHECK(profile.k);
    CHECK(profile.h_prime);
    for (double s : {0.0, 0.5, 1.0, 2.0}) CHECK(profile.satisfies_l(s));
}

TEST_CASE("hypothesis profile: finite activity keeps all L-s, co-jump vol keeps H'") {
    ModelSpec cp;
    cp.vol = VolSpec::exp_ou(0.4, 2.0, 0.5, -0.3);
    cp.jumps = JumpSpec::compound_poisson(1.0, JumpSizeSpec::gaussian(0.0, 0.25));
    const HypothesisProfile profile = hypothesis_profile(cp);
    CHECK(profile.satisfies_l(0.0));
    CHECK(profile.satisfies_l(2.0));
    CHECK(profile.h_prime);
}

TEST_CASE("hypothesis profile: stable_like L-s holds strictly above beta") {
    ModelSpec stable;
    stable.vol = VolSpec::exp_ou(0.4, 2.0, 0.5, 0.0);
    stable.jumps = JumpSpec::stable_like(1.5, 0.02);
    const HypothesisProfile profile = hypothesis_profile(stable);
    CHECK_FALSE(profile.satisfies_l(1.0));
    CHECK_FALSE(profile.satisfies_l(1.5));  // integral of gamma^beta diverges
    CHECK(profile.satisfies_l(1.6));
    CHECK(profile.satisfies_l(2.0));
}

TEST_CASE("L-s membership is upward closed in s") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        ModelSpec spec = bm(0.5);
        const double which = rng.uniform();
        if (which < 0.33) {
            spec.jumps = JumpSpec::none();
        } else if (which < 0.66) {
            spec.jumps = JumpSpec::compound_poisson(0.5 + rng.uniform(), JumpSizeSpec::fixed(1.0));
        } else {
            spec.jumps = JumpSpec::stable_like(0.1 + 1.8 * rng.uniform(), 0.01);
        }
        const HypothesisProfile profile = hypothesis_profile(spec);
        const double s = 2.0 * rng.uniform();
        const double s_up = s + (2.0 - s) * rng.uniform();
        if (profile.satisfies_l(s)) CHECK(profile.satisfies_l(s_up));
        CHECK(profile.h);
    }
}

TEST_CASE("stable-like integrability threshold checked numerically via phi_s") {
    // bound gamma(x) = (x/scale + 1)^{-1/beta}: int phi_s(gamma(x)) dx is
    // finite iff s > beta (tail exponent -s/beta)
    const double beta = 1.5, scale = 0.05;
    auto gamma = [&](double x) { return std::pow(x / scale + 1.0, -1.0 / beta); };
    auto partial = [&](double s, double upper) {
        const int n = 200000;
        double acc = 0.0;
        const double step = upper / n;
        for (int i = 0; i < n; ++i) {
            const double x = (i + 0.5) * step;
            acc += phi_r(s, gamma(x)) * step;
        }
        return acc;
    };
    // s above the threshold: doubling the domain barely moves the integral
    const double conv_1 = partial(1.8, 500.0);
    const double conv_2 = partial(1.8, 1000.0);
    CHECK(conv_2 - conv_1 < 0.05 * conv_1);
    // s below: the tail keeps accumulating
    const double div_1 = partial(1.2, 500.0);
    const double div_2 = partial(1.2, 1000.0);
    CHECK(div_2 - div_1 > 0.1 * div_1);
}

TEST_CASE("activity index ignores drift and vol") {
    ModelSpec a = bm(0.1);
    a.jumps = JumpSpec::stable_like(0.8, 0.02);
    ModelSpec b = a;
    b.vol = VolSpec::exp_ou(2.0, 1.0, 1.0, 0.5);
    b.drift = DriftSpec::constant(3.0);
    CHECK(activity_index(a) == activity_index(b));
}

TEST_CASE("sampling spec validation") {
    SamplingSpec s;
    s.horizon = 1.0;
    s.delta_n = 0.25;
    s.refine = 4;
    CHECK(s.validate().empty());
    CHECK(s.n_observations() == 4);
    CHECK(s.n_fine_steps() == 16);

    s.delta_n = 2.0;
    CHECK_FALSE(s.validate().empty());

    s.delta_n = 0.3;  // does not divide the horizon
    CHECK_FALSE(s.validate().empty());

    s.delta_n = 0.25;
    s.refine = 0;
    CHECK_FALSE(s.validate().empty());
}

TEST_CASE("truncation spec validation") {
    TruncationSpec ok{0.49, 3.0};
    CHECK(ok.validate().empty());
    CHECK(ok.threshold(0.25) == doctest::Approx(3.0 * std::pow(0.25, 0.49)));
    TruncationSpec bad{0.5, 3.0};
    CHECK_FALSE(bad.validate().empty());
    TruncationSpec bad2{0.3, -1.0};
    CHECK_FALSE(bad2.validate().empty());
}
