#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "powvar/functionals.hpp"
#include "powvar/harness.hpp"
#include "powvar/report.hpp"
#include "powvar/rng.hpp"

using namespace powvar;

namespace {

ExperimentPlan base_plan() {
    ExperimentPlan plan;
    plan.model.vol = VolSpec::constant(0.5);
    plan.horizon = 1.0;
    plan.refine = 4;
    plan.t_eval = 1.0;
    plan.replicates = 100;
    plan.base_seed = 31337;
    plan.jobs = 2;
    return plan;
}

Functional fn_of(Theorem thm, TestFunction f) {
    Functional fn;
    fn.theorem = thm;
    fn.f = f;
    return fn;
}

Functional fn_trunc(Theorem thm, double varpi, double alpha) {
    Functional fn;
    fn.theorem = thm;
    fn.trunc = TruncationSpec{varpi, alpha};
    return fn;
}

}  // namespace

TEST_CASE("lln on brownian motion: T3ii error shrinks and slope is near -1/2") {
    ExperimentPlan plan = base_plan();
    plan.functionals.push_back(fn_of(Theorem::T3ii, TestFunction::power(1.0)));
    plan.delta_ladder = {1.0 / 64, 1.0 / 256, 1.0 / 1024};
    plan.replicates = 200;
    const TheoremReport report = run_lln(plan);
    REQUIRE(report.admissible);
    REQUIRE(report.rungs.size() == 3);
    CHECK(report.rungs[0].rmse > report.rungs[2].rmse);
    REQUIRE(report.rate.has_value());
    CHECK_FALSE(report.rate->degenerate);
    CHECK(report.rate->slope > -0.8);  // log2 RMSE against log2(1/delta)
    CHECK(report.rate->slope < -0.2);
    for (const auto& rung : report.rungs)
        CHECK(rung.rmse >= std::abs(rung.mean_error) - 1e-15);
}

TEST_CASE("deterministic drift-only model flags a degenerate fit") {
    ExperimentPlan plan = base_plan();
    plan.model.vol = VolSpec::constant(0.0);
    plan.model.drift = DriftSpec::constant(1.0);
    plan.functionals.push_back(fn_of(Theorem::T3ii, TestFunction::power(1.0)));
    plan.delta_ladder = {1.0 / 64, 1.0 / 256};
    const TheoremReport report = run_lln(plan);
    REQUIRE(report.admissible);
    // statistic = sqrt(delta) * t exactly, limit = 0: error deterministic
    CHECK(report.rungs[0].mean_error == doctest::Approx(std::sqrt(1.0 / 64)).epsilon(1e-12));
    REQUIRE(report.rate.has_value());
    CHECK(report.rate->degenerate);
}

TEST_CASE("report determinism across worker counts") {
    ExperimentPlan plan = base_plan();
    plan.model.vol = VolSpec::exp_ou(0.5, 2.0, 0.5, -0.2);
    plan.functionals.push_back(fn_trunc(Theorem::T6p, 0.49, 3.0));
    plan.delta_ladder = {1.0 / 128, 1.0 / 512};
    plan.replicates = 64;

    plan.jobs = 1;
    const TheoremReport serial = run_lln(plan);
    plan.jobs = 8;
    const TheoremReport parallel = run_lln(plan);
    REQUIRE(serial.rungs.size() == parallel.rungs.size());
    for (std::size_t i = 0; i < serial.rungs.size(); ++i) {
        CHECK(serial.rungs[i].mean_error == parallel.rungs[i].mean_error);  // bitwise
        CHECK(serial.rungs[i].rmse == parallel.rungs[i].rmse);
    }
    CHECK(report_json(serial).dump() == report_json(parallel).dump());
}

TEST_CASE("scaling consistency: T3ii via v_n scaling equals via v_prime") {
    // both paths through the harness use the factored form; assert the
    // exact identity at the report level by running T3ii and T6 (same
    // statistic) on the same seed
    ExperimentPlan plan = base_plan();
    plan.functionals.push_back(fn_of(Theorem::T3ii, TestFunction::power(0.5)));
    plan.delta_ladder = {1.0 / 256};
    const TheoremReport a = run_lln(plan);
    plan.functionals[0].theorem = Theorem::T6;
    const TheoremReport b = run_lln(plan);
    CHECK(a.rungs[0].mean_statistic == b.rungs[0].mean_statistic);  // bitwise
}

TEST_CASE("clt run on brownian motion passes its bands") {
    // sigma = 0.5 keeps the truncation threshold at ~6.4 increment standard
    // deviations, so the centering is clean at this delta
    ExperimentPlan plan = base_plan();
    plan.model.vol = VolSpec::constant(0.5);
    plan.functionals.push_back(fn_trunc(Theorem::T6p, 0.49, 3.0));
    plan.delta_ladder = {1.0 / 1024};
    plan.replicates = 300;
    plan.bands.var_band = {0.75, 1.25};
    plan.bands.min_ks_p = 0.001;
    const TheoremReport report = run_clt(plan);
    REQUIRE(report.admissible);
    REQUIRE(report.clt.has_value());
    CHECK(report.clt->m == 300);
    CHECK(report.clt->z_variance > 0.7);
    CHECK(report.clt->z_variance < 1.3);
    CHECK(report.clt->ks_p > 0.001);
    CHECK(report.bands_checked);
    CHECK(report.bands_pass);
    // theoretical variance: 2 sigma^4 t = 0.125
    CHECK(report.clt->mean_variance == doctest::Approx(0.125).epsilon(1e-9));
}

TEST_CASE("clt region refusal carries the exponent") {
    ExperimentPlan plan = base_plan();
    plan.model.vol = VolSpec::exp_ou(0.5, 1.0, 0.3, 0.0);
    plan.model.jumps = JumpSpec::stable_like(0.5, 0.001);
    plan.functionals.push_back(fn_trunc(Theorem::T6p, 0.3, 2.0));
    plan.delta_ladder = {1.0 / 256};
    const TheoremReport report = run_clt(plan);
    CHECK_FALSE(report.admissible);
    CHECK(report.refusal.find("(4*varpi - 1)/(2*varpi)") != std::string::npos);
    CHECK(report.degenerate_exponent == doctest::Approx((2.0 - 0.5) * 0.3).epsilon(1e-12));
}

TEST_CASE("clt refuses zero variance with an explicit error") {
    ExperimentPlan plan = base_plan();
    plan.model.vol = VolSpec::constant(0.0);
    plan.model.drift = DriftSpec::constant(1.0);
    plan.functionals.push_back(fn_trunc(Theorem::T6p, 0.49, 3.0));
    plan.delta_ladder = {1.0 / 256};
    try {
        run_clt(plan);
        FAIL("expected a degenerate-variance refusal");
    } catch (const AdmissibilityError& e) {
        CHECK(std::string(e.what()).find("degenerate variance") != std::string::npos);
    }
}

TEST_CASE("clt rejects tiny replicate counts") {
    ExperimentPlan plan = base_plan();
    plan.functionals.push_back(fn_trunc(Theorem::T6p, 0.49, 3.0));
    plan.delta_ladder = {1.0 / 256};
    plan.replicates = 50;
    CHECK_THROWS(run_clt(plan));
}

TEST_CASE("covariance pair: diagonal consistency to round-off") {
    ExperimentPlan plan = base_plan();
    plan.model.vol = VolSpec::constant(1.0);
    plan.functionals.push_back(fn_trunc(Theorem::T6p, 0.49, 3.0));
    plan.functionals.push_back(fn_trunc(Theorem::T6p, 0.49, 3.0));
    plan.delta_ladder = {1.0 / 512};
    plan.replicates = 200;
    const CovarianceReport report = run_covariance_pair(plan);
    REQUIRE(report.admissible);
    CHECK(report.theoretical_cov == doctest::Approx(report.theoretical_var_j).epsilon(1e-12));
    CHECK(report.theoretical_cov == doctest::Approx(2.0).epsilon(1e-12));
    // empirical variance of each component agrees with its covariance target
    CHECK(std::abs(report.empirical_cov - report.theoretical_cov) <
          6.0 * report.standard_error);
}

TEST_CASE("lln run for T2 on a Levy model shrinks toward the compensated limit") {
    ExperimentPlan plan = base_plan();
    plan.model.vol = VolSpec::constant(0.4);
    plan.model.jumps = JumpSpec::compound_poisson(1.0, JumpSizeSpec::fixed(1.0));
    Functional fn;
    fn.theorem = Theorem::T2;
    fn.f = TestFunction::power(1.5);
    fn.psi_eta = 0.25;  // the compensator window excludes the unit jumps
    plan.functionals.push_back(fn);
    plan.delta_ladder = {1.0 / 64, 1.0 / 512};
    plan.replicates = 150;
    const TheoremReport report = run_lln(plan);
    REQUIRE(report.admissible);
    CHECK(report.rungs[1].rmse < report.rungs[0].rmse);
    CHECK(std::abs(report.rungs[1].mean_error) < 0.05);
}

TEST_CASE("clt run for T4 standardizes against the Levy compensator") {
    ExperimentPlan plan = base_plan();
    plan.model.vol = VolSpec::constant(0.5);
    plan.model.jumps = JumpSpec::compound_poisson(1.0, JumpSizeSpec::fixed(1.0));
    Functional fn;
    fn.theorem = Theorem::T4;
    fn.f = TestFunction::power(1.0);
    fn.psi_eta = 0.25;
    plan.functionals.push_back(fn);
    plan.delta_ladder = {1.0 / 1024};
    plan.replicates = 250;
    const TheoremReport report = run_clt(plan);
    REQUIRE(report.admissible);
    // variance target (1 - 2/pi) sigma^2 t
    CHECK(report.clt->mean_variance ==
          doctest::Approx((1.0 - 2.0 / 3.14159265358979323846) * 0.25).epsilon(1e-9));
    CHECK(report.clt->z_variance > 0.7);
    CHECK(report.clt->z_variance < 1.3);
    CHECK(std::abs(report.clt->z_mean) < 0.25);
    CHECK(report.clt->ks_p > 1e-4);
}

TEST_CASE("clt run for the pure jump theorem T7i") {
    // High jump rate so every replicate carries conditional variance.  An
    // increment holding two jumps contributes (J1+J2)^4 - J1^4 - J2^4 ~ 3.4
    // against a CLT scale of ~0.03; such increments occur with probability
    // O((lambda delta)^2) per step and vanish only as delta -> 0, so the
    // sample moments carry rare huge outliers while the bulk law is already
    // standard normal.  Assert the distribution (KS, median), not moments.
    ExperimentPlan plan = base_plan();
    plan.model.vol = VolSpec::constant(0.3);
    plan.model.jumps = JumpSpec::compound_poisson(20.0, JumpSizeSpec::fixed(0.7));
    plan.functionals.push_back(fn_of(Theorem::T7i, TestFunction::power(4.0)));
    plan.delta_ladder = {1.0 / 4096};
    plan.replicates = 400;
    const TheoremReport report = run_clt(plan);
    REQUIRE(report.admissible);
    CHECK(report.clt->ks_p > 1e-3);
    std::vector<double> z = report.clt->z;
    std::sort(z.begin(), z.end());
    CHECK(std::abs(z[z.size() / 2]) < 0.2);
}

TEST_CASE("pure compound poisson T1a is exact whenever jumps are isolated") {
    ModelSpec model;
    model.vol = VolSpec::constant(0.0);
    model.jumps = JumpSpec::compound_poisson(3.0, JumpSizeSpec::fixed(1.0));
    SamplingSpec samp;
    samp.horizon = 1.0;
    samp.delta_n = 1.0 / 512;
    samp.refine = 4;
    const double delta = samp.delta_n;
    std::size_t isolated_paths = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const PathBundle path = simulate_path(model, samp, derive_seed(4000, seed));
        std::vector<int> counts(512, 0);
        bool isolated = true;
        for (const auto& jump : path.jumps) {
            const auto i = std::min<std::size_t>(511, static_cast<std::size_t>(jump.time / delta));
            if (++counts[i] > 1) isolated = false;
        }
        if (!isolated) continue;
        ++isolated_paths;
        const auto incs = restrict_to_observations(path, delta);
        const double stat = v_n(TestFunction::power(3.0), incs, delta).terminal();
        const double target = jump_functional(TestFunction::power(3.0), path, delta).terminal();
        CHECK(stat == target);  // unit jump sizes: both sums are exact
    }
    CHECK(isolated_paths > 40);
}

TEST_CASE("no CLT for 2 < r <= 3: the error decays slower than sqrt(delta)") {
    // V^n(h_r) - f*mu: the diffusion residual scales like delta^{r/2 - 1},
    // so the fitted rate sits near -(r/2 - 1) = -0.25 instead of -0.5
    ExperimentPlan plan = base_plan();
    plan.model.vol = VolSpec::constant(1.0);
    plan.model.jumps = JumpSpec::compound_poisson(2.0, JumpSizeSpec::fixed(1.0));
    plan.functionals.push_back(fn_of(Theorem::T1a, TestFunction::power(2.5)));
    plan.delta_ladder = {1.0 / 1024, 1.0 / 4096, 1.0 / 16384, 1.0 / 65536};
    plan.refine = 2;
    plan.replicates = 100;
    const TheoremReport report = run_lln(plan);
    REQUIRE(report.admissible);
    REQUIRE(report.rate.has_value());
    CHECK(report.rate->slope > -0.35);
    CHECK(report.rate->slope < -0.15);
}

TEST_CASE("t_eval below the horizon restricts the comparison window") {
    ExperimentPlan plan = base_plan();
    plan.functionals.push_back(fn_of(Theorem::T3ii, TestFunction::power(1.0)));
    plan.delta_ladder = {1.0 / 256};
    plan.t_eval = 0.5;
    const TheoremReport report = run_lln(plan);
    REQUIRE(report.admissible);
    // limit is m_1 sigma t with t = 1/2
    CHECK(report.rungs[0].mean_limit ==
          doctest::Approx(abs_moment(1.0) * 0.5 * 0.5).epsilon(1e-12));
}

TEST_CASE("feasible (estimated-variance) studentization for T6p") {
    ExperimentPlan plan = base_plan();
    plan.model.vol = VolSpec::exp_ou(0.4, 2.0, 0.4, -0.3);
    plan.functionals.push_back(fn_trunc(Theorem::T6p, 0.49, 3.0));
    plan.delta_ladder = {1.0 / 2048};
    plan.replicates = 300;
    plan.feasible_variance = true;
    const TheoremReport report = run_clt(plan);
    REQUIRE(report.admissible);
    CHECK(report.clt->z_variance > 0.7);
    CHECK(report.clt->z_variance < 1.3);
    CHECK(report.clt->ks_p > 1e-3);

    // estimated variance tracks the oracle one on average
    plan.feasible_variance = false;
    const TheoremReport oracle = run_clt(plan);
    CHECK(report.clt->mean_variance ==
          doctest::Approx(oracle.clt->mean_variance).epsilon(0.05));

    plan.functionals[0] = fn_of(Theorem::T5, TestFunction::rational_square());
    plan.feasible_variance = true;
    CHECK_THROWS(run_clt(plan));
}

TEST_CASE("covariance pair refuses a J4-incompatible hypothesis region") {
    ExperimentPlan plan = base_plan();
    plan.model.vol = VolSpec::exp_ou(0.5, 1.0, 0.3, 0.0);
    plan.model.jumps = JumpSpec::stable_like(0.9, 0.001);
    plan.functionals.push_back(fn_of(Theorem::T3ii, TestFunction::power(0.2)));
    plan.functionals.push_back(fn_trunc(Theorem::T6p, 0.49, 3.0));
    plan.delta_ladder = {1.0 / 256};
    const CovarianceReport report = run_covariance_pair(plan);
    CHECK_FALSE(report.admissible);
    CHECK(report.refusal.find("sqrt(3*s^2 - 8*s + 5)") != std::string::npos);
}
