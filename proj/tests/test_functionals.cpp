#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "powvar/functionals.hpp"
#include "powvar/rng.hpp"

#include "oracles.hpp"

using namespace powvar;

namespace {

std::vector<double> random_increments(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& v : out) v = 0.3 * rng.normal();
    return out;
}

PathBundle make_path(const ModelSpec& spec, double horizon, double delta, int refine,
                     std::uint64_t seed) {
    SamplingSpec s;
    s.horizon = horizon;
    s.delta_n = delta;
    s.refine = refine;
    return simulate_path(spec, s, seed);
}

}  // namespace

TEST_CASE("v_n running sums") {
    const double incs[] = {0.25, 0.25, 0.25, 0.25};
    const auto series = v_n(TestFunction::power(2), incs, 0.25);
    CHECK(series.values.front() == 0.0);
    CHECK(series.terminal() == doctest::Approx(0.25));

    const double one_jump[] = {0.0, 1.0, 0.0, 0.0};
    CHECK(v_n(TestFunction::power(3), one_jump, 0.25).terminal() == doctest::Approx(1.0));

    const double pair[] = {0.1, -0.2};
    CHECK(v_n(TestFunction::power(1), pair, 0.5).terminal() == doctest::Approx(0.3));
}

TEST_CASE("v_prime_n definition and homogeneity") {
    const double half[] = {0.5};
    CHECK(v_prime_n(TestFunction::power(2), half, 0.25).terminal() == doctest::Approx(1.0));

    const auto incs = random_increments(64, 5);
    for (double r : {0.5, 1.0, 1.5}) {
        const auto lhs = v_prime_n(TestFunction::power(r), incs, 0.125);
        const auto rhs = v_n(TestFunction::power(r), incs, 0.125);
        const double scale = std::pow(0.125, -r / 2.0);
        for (std::size_t i = 0; i < lhs.values.size(); ++i)
            CHECK(lhs.values[i] == doctest::Approx(rhs.values[i] * scale).epsilon(1e-14));
    }

    const double zeros[] = {0.0, 0.0, 0.0};
    CHECK(v_prime_n(TestFunction::rational_square(), zeros, 0.1).terminal() == 0.0);
}

TEST_CASE("scaling identity is bit-exact for dyadic delta") {
    const auto incs = random_increments(256, 11);
    for (double r : {0.5, 1.0, 1.5}) {
        for (int e : {-4, -10, -14}) {
            const double delta = std::pow(2.0, e);
            const auto vn = v_n(TestFunction::power(r), incs, delta);
            const auto vp = v_prime_n(TestFunction::power(r), incs, delta);
            const double pow_scale = std::pow(delta, -r / 2.0);
            for (std::size_t i = 0; i < vn.values.size(); ++i) {
                const double lhs = (delta * pow_scale) * vn.values[i];  // Delta^{1-r/2} V^n
                const double rhs = delta * vp.values[i];                // Delta V'^n
                CHECK(lhs == rhs);  // bitwise
            }
        }
    }
}

TEST_CASE("truncated variance thresholds") {
    const double incs[] = {0.0, 1.0, 0.0, 0.0};
    const TruncationSpec trunc{0.49, 1.0};
    CHECK(v_trunc_n(trunc, incs, 0.25).terminal() == 0.0);  // threshold ~ 0.507 excludes the jump

    const auto small = random_increments(100, 3);
    std::vector<double> shrunk(small);
    for (double& v : shrunk) v *= 1e-3;
    const auto truncated = v_trunc_n(TruncationSpec{0.25, 2.0}, shrunk, 1.0 / 1024);
    const auto plain = v_n(TestFunction::power(2), shrunk, 1.0 / 1024);
    CHECK(truncated.terminal() == doctest::Approx(plain.terminal()));

    const auto big = random_increments(100, 4);
    const auto vacuous = v_trunc_n(TruncationSpec{0.49, 1e9}, big, 1.0 / 1024);
    const auto all = v_n(TestFunction::power(2), big, 1.0 / 1024);
    CHECK(vacuous.terminal() == doctest::Approx(all.terminal()));
}

TEST_CASE("truncated variance is monotone in alpha and bounded by realized variance") {
    const auto incs = random_increments(200, 6);
    const double delta = 1.0 / 256;
    double previous = 0.0;
    for (double alpha : {0.1, 0.3, 1.0, 3.0, 10.0}) {
        const double value = v_trunc_n(TruncationSpec{0.3, alpha}, incs, delta).terminal();
        CHECK(value >= previous);
        previous = value;
    }
    CHECK(previous <= v_n(TestFunction::power(2), incs, delta).terminal() + 1e-15);
}

TEST_CASE("running values are non-decreasing for nonnegative f") {
    Rng rng(77);
    std::vector<double> incs(128);
    for (double& v : incs) v = rng.normal();
    for (const TestFunction& f :
         {TestFunction::power(0.7), TestFunction::power_cutoff(2.0, 0.5), TestFunction::cos_bump()}) {
        const auto series = v_n(f, incs, 1.0 / 128);
        for (std::size_t i = 1; i < series.values.size(); ++i)
            CHECK(series.values[i] >= series.values[i - 1]);
    }
}

TEST_CASE("realized variance dominates the squared-mean bound") {
    // Cauchy-Schwarz: V^n(h_2) >= (sum increments)^2 / count
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> incs(64);
        double sum = 0.0;
        for (double& v : incs) {
            v = rng.normal() + 0.2;
            sum += v;
        }
        const double v2 = v_n(TestFunction::power(2), incs, 1.0 / 64).terminal();
        CHECK(v2 >= sum * sum / 64.0 - 1e-12);
    }
}

TEST_CASE("jump functional accumulates the jump record") {
    ModelSpec spec;
    spec.vol = VolSpec::constant(0.0);
    spec.jumps = JumpSpec::compound_poisson(2.0, JumpSizeSpec::fixed(0.5));
    const PathBundle path = make_path(spec, 1.0, 1.0 / 16, 4, 21);
    const auto series = jump_functional(TestFunction::power(2), path, 1.0 / 16);
    CHECK(series.terminal() == doctest::Approx(0.25 * path.jumps.size()));

    ModelSpec continuous;
    continuous.vol = VolSpec::constant(0.3);
    const PathBundle smooth = make_path(continuous, 1.0, 1.0 / 16, 4, 22);
    CHECK(jump_functional(TestFunction::power(2), smooth, 1.0 / 16).terminal() == 0.0);
}

TEST_CASE("limit target T1 cases") {
    // (b): f ~ x^2 at 0 -> jumps + C
    ModelSpec bm;
    bm.vol = VolSpec::constant(0.5);
    const PathBundle path = make_path(bm, 1.0, 1.0 / 32, 8, 31);
    const auto target = limit_target_t1(TestFunction::power(2), bm, path, 1.0 / 32);
    CHECK(target.terminal() == doctest::Approx(0.25).epsilon(1e-9));

    // (a): pure jump, f = |x|^3
    ModelSpec cp;
    cp.vol = VolSpec::constant(0.0);
    cp.jumps = JumpSpec::compound_poisson(3.0, JumpSizeSpec::fixed(1.0));
    const PathBundle jumps = make_path(cp, 1.0, 1.0 / 32, 8, 32);
    const auto t1a = limit_target_t1(TestFunction::power(3), cp, jumps, 1.0 / 32);
    const auto jf = jump_functional(TestFunction::power(3), jumps, 1.0 / 32);
    CHECK(t1a.terminal() == doctest::Approx(jf.terminal()));

    // (c): drift only, f = |x|
    ModelSpec drift;
    drift.drift = DriftSpec::constant(1.0);
    drift.vol = VolSpec::constant(0.0);
    const PathBundle line = make_path(drift, 1.0, 1.0 / 32, 8, 33);
    CHECK(limit_target_t1(TestFunction::power(1), drift, line, 1.0 / 32).terminal() ==
          doctest::Approx(1.0));

    // no case: f = |x| on a diffusion
    CHECK_THROWS_AS(limit_target_t1(TestFunction::power(1), bm, path, 1.0 / 32), NoLlnTarget);

    // (c) with a time-varying drift: variation of a pure sine is 2/pi
    ModelSpec sine;
    sine.drift.kind = DriftKind::Sine;
    sine.drift.level = 0.0;
    sine.drift.amplitude = 1.0;
    sine.drift.frequency = 1.0;
    sine.vol = VolSpec::constant(0.0);
    const PathBundle wave = make_path(sine, 1.0, 1.0 / 32, 8, 34);
    CHECK(limit_target_t1(TestFunction::power(1), sine, wave, 1.0 / 32).terminal() ==
          doctest::Approx(2.0 / 3.14159265358979323846).epsilon(1e-8));
}

TEST_CASE("levy increment expectation: pure Gaussian cases") {
    ModelSpec gauss;
    gauss.vol = VolSpec::constant(1.0);
    const double delta = 0.01;

    // wide cutoff: E[(sigma sqrt(d) U)^2 psi] ~ sigma^2 delta
    const auto wide = levy_increment_expectation(gauss, TestFunction::power_cutoff(2.0, 10.0), delta);
    CHECK(wide.value == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(wide.error_bound < 1e-6);

    // even bounded f, zero drift: equals rho_{sigma sqrt(delta)}(f)
    const TestFunction f = TestFunction::rational_square();
    const auto h = levy_increment_expectation(gauss, f, delta);
    CHECK(h.value == doctest::Approx(rho(f, std::sqrt(delta))).epsilon(1e-8));
}

TEST_CASE("levy increment expectation: two-term Poisson expansion") {
    ModelSpec cp;
    cp.vol = VolSpec::constant(0.0);
    cp.jumps = JumpSpec::compound_poisson(1.0, JumpSizeSpec::fixed(0.5));
    const double delta = 0.01;  // lambda * delta = 0.01
    const TestFunction f = TestFunction::power_cutoff(2.0, 1.0);  // all jump mass inside |x| <= eta
    const auto h = levy_increment_expectation(cp, f, delta);
    const double m = 0.01;
    const double expected = std::exp(-m) * (m * 0.25 + 0.5 * m * m * 1.0);
    CHECK(h.value == doctest::Approx(expected).epsilon(1e-9));
    CHECK(h.value == doctest::Approx(m * 0.25).epsilon(2.0 * m));

    ModelSpec bad = cp;
    bad.jumps = JumpSpec::stable_like(0.5, 0.01);
    CHECK_THROWS(levy_increment_expectation(bad, f, delta));
    CHECK_THROWS(levy_increment_expectation(cp, TestFunction::power(2.0), delta));
}

TEST_CASE("levy increment expectation: gaussian and double-exponential sizes") {
    // against a brute-force tanh-sinh convolution oracle at k = 1 dominance
    ModelSpec cp;
    cp.drift = DriftSpec::constant(0.1);
    cp.vol = VolSpec::constant(0.4);
    cp.jumps = JumpSpec::compound_poisson(0.8, JumpSizeSpec::gaussian(0.1, 0.04));
    const double delta = 0.02;
    const TestFunction f = TestFunction::rational_square();
    const auto h = levy_increment_expectation(cp, f, delta, 1e-10);

    const double m = 0.8 * delta;
    const double mu = 0.1 * delta;
    const double s = 0.4 * std::sqrt(delta);
    auto gauss_term = [&](int k) {
        const double mk = mu + 0.1 * k;
        const double sk = std::sqrt(s * s + 0.04 * k);
        return oracles::gaussian_expectation_oracle([&](double x) { return f(mk + x); }, sk);
    };
    const double oracle =
        std::exp(-m) * (gauss_term(0) + m * gauss_term(1) + 0.5 * m * m * gauss_term(2));
    CHECK(h.value == doctest::Approx(oracle).epsilon(1e-8));

    cp.jumps = JumpSpec::compound_poisson(0.8, JumpSizeSpec::double_exponential(0.3, 0.5));
    CHECK_NOTHROW(levy_increment_expectation(cp, f, delta));
}

TEST_CASE("integrate_c_power on a constant path") {
    ModelSpec bm;
    bm.vol = VolSpec::constant(0.5);
    const PathBundle path = make_path(bm, 1.0, 1.0 / 16, 4, 41);
    CHECK(integrate_c_power(path, 1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(integrate_c_power(path, 2.0, 0.5) == doctest::Approx(0.5 * 0.0625).epsilon(1e-12));
}
