#include "powvar/harness.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "powvar/functionals.hpp"
#include "powvar/quadrature.hpp"

namespace powvar {

namespace {

double terminal_obs_time(double t_eval, double delta) {
    return delta * std::floor(t_eval / delta + 1e-12);
}

// f * psi_eta as a catalog function, needed for the Levy compensator of
// T2/T4; only power functions compose with a finite cutoff.
TestFunction apply_psi(const TestFunction& f, double eta) {
    if (std::isinf(eta)) {
        if (!f.is_bounded())
            throw std::invalid_argument("psi_eta with eta = inf needs a bounded f");
        return f;
    }
    if (f.kind() == FuncKind::Power) return TestFunction::power_cutoff(f.r(), eta);
    throw std::invalid_argument("f * psi_eta is only in the catalog for power f (got " + f.name() + ")");
}

bool needs_levy_compensator(Theorem thm) { return thm == Theorem::T2 || thm == Theorem::T4; }

// scale of the CLT normalization: error / (scale * sqrt(variance)) ~ N(0,1)
double clt_scale(Theorem thm, double delta) { return thm == Theorem::T4 ? 1.0 : std::sqrt(delta); }

struct PathEval {
    double statistic = 0.0;
    double center = 0.0;
    double variance = 0.0;
};

// statistic and centering at time t for one rung; levy_h is the per-increment
// compensator for T2/T4 (precomputed once per rung).
PathEval evaluate_at(const Functional& fn, const ModelSpec& spec, const PathBundle& path, double delta,
                     double t_eval, double levy_h, bool need_variance) {
    PathEval eval;
    const double t_obs = terminal_obs_time(t_eval, delta);
    const std::vector<double> increments = restrict_to_observations(path, delta);
    const std::span<const double> incs(increments);

    switch (fn.theorem) {
        case Theorem::T1a:
        case Theorem::T1b:
        case Theorem::T1c:
            eval.statistic = v_n(*fn.f, incs, delta).at_time(t_obs);
            eval.center = limit_target_t1(*fn.f, spec, path, delta).at_time(t_obs);
            break;
        case Theorem::T2:
        case Theorem::T4: {
            const double n_steps = std::floor(t_obs / delta + 1e-12);
            eval.statistic = v_n(*fn.f, incs, delta).at_time(t_obs) - n_steps * levy_h;
            eval.center =
                t2_limit_compound_poisson(*fn.f, fn.psi_eta, spec, path, delta).at_time(t_obs);
            break;
        }
        case Theorem::T3i:
        case Theorem::T5:
            eval.statistic = delta * v_prime_n(*fn.f, incs, delta).at_time(t_obs);
            eval.center = integral_of_rho(*fn.f, spec, path, t_obs);
            break;
        case Theorem::T3ii:
        case Theorem::T6:
            // Delta^{1-r/2} V^n(f); for powers via Delta * V'^n so the
            // scaling identity is exact, directly otherwise (f need not be
            // homogeneous).
            if (fn.f->kind() == FuncKind::Power)
                eval.statistic = delta * v_prime_n(*fn.f, incs, delta).at_time(t_obs);
            else
                eval.statistic =
                    std::pow(delta, 1.0 - 0.5 * fn.f->r()) * v_n(*fn.f, incs, delta).at_time(t_obs);
            eval.center = integral_m_r_c(fn.f->r(), spec, path, t_obs);
            break;
        case Theorem::T3iii:
        case Theorem::T6p:
            eval.statistic = v_trunc_n(*fn.trunc, incs, delta).at_time(t_obs);
            eval.center = spec.vol.kind == VolKind::Constant
                              ? spec.vol.sigma0 * spec.vol.sigma0 * t_obs
                              : integrate_c_power(path, 1.0, t_obs);
            break;
        case Theorem::T7i:
            eval.statistic = v_n(*fn.f, incs, delta).at_time(t_obs);
            eval.center = jump_functional(*fn.f, path, delta).at_time(t_obs);
            break;
        case Theorem::T7ii:
            eval.statistic = v_n(*fn.f, incs, delta).at_time(t_obs);
            eval.center = jump_functional(*fn.f, path, delta).at_time(t_obs) +
                          integrate_c_power(path, 1.0, t_obs);
            break;
    }
    if (need_variance) eval.variance = clt_variance(fn, spec, path, t_obs);
    return eval;
}

std::string band_failure(const std::string& what, double value, const std::string& band) {
    std::ostringstream os;
    os << what << " = " << value << " outside " << band;
    return os.str();
}

std::string format_pair(const std::pair<double, double>& band) {
    std::ostringstream os;
    os << "[" << band.first << ", " << band.second << "]";
    return os.str();
}

void refuse_report(TheoremReport& report, const AdmissibilityError& error) {
    report.admissible = false;
    report.refusal = error.what();
    report.degenerate_exponent = error.degenerate_exponent;
}

}  // namespace

SamplingSpec ExperimentPlan::sampling() const {
    SamplingSpec s;
    s.horizon = horizon;
    s.delta_n = delta_ladder.empty() ? horizon : delta_ladder.back();
    s.refine = refine;
    return s;
}

std::vector<std::string> ExperimentPlan::validate() const {
    std::vector<std::string> out;
    if (functionals.empty()) out.push_back("plan needs at least one functional");
    if (delta_ladder.empty()) out.push_back("plan needs a delta ladder");
    for (std::size_t i = 1; i < delta_ladder.size(); ++i)
        if (delta_ladder[i] >= delta_ladder[i - 1]) out.push_back("delta ladder must be strictly decreasing");
    if (replicates < 2) out.push_back("replicates must be >= 2");
    if (!(t_eval > 0.0) || t_eval > horizon + 1e-12) out.push_back("t_eval must be in (0, horizon]");
    const auto sampling_errors = sampling().validate();
    out.insert(out.end(), sampling_errors.begin(), sampling_errors.end());
    if (!delta_ladder.empty()) {
        const double h = sampling().fine_step();
        for (double d : delta_ladder) {
            const double ratio = d / h;
            if (std::abs(ratio - std::llround(ratio)) > 1e-9 * std::max(1.0, ratio)) {
                out.push_back("every ladder step must be an integer multiple of the fine step");
                break;
            }
        }
    }
    const auto model_report = validate_model(model);
    out.insert(out.end(), model_report.errors.begin(), model_report.errors.end());
    return out;
}

TheoremReport run_lln(const ExperimentPlan& plan) {
    const auto problems = plan.validate();
    if (!problems.empty()) throw std::invalid_argument("run_lln: " + problems.front());
    const Functional& fn = plan.functionals.front();

    TheoremReport report;
    report.label = fn.label();
    try {
        check_admissible(fn, plan.model);
    } catch (const AdmissibilityError& error) {
        refuse_report(report, error);
        return report;
    }

    const SamplingSpec sampling = plan.sampling();
    const std::size_t m = plan.replicates;
    const std::size_t n_rungs = plan.delta_ladder.size();

    // per-rung Levy compensator (path independent)
    std::vector<double> levy_h(n_rungs, 0.0);
    if (needs_levy_compensator(fn.theorem)) {
        const TestFunction f_psi = apply_psi(*fn.f, fn.psi_eta);
        for (std::size_t k = 0; k < n_rungs; ++k)
            levy_h[k] = levy_increment_expectation(plan.model, f_psi, plan.delta_ladder[k]).value;
    }

    // slot-per-replicate so aggregation is independent of scheduling
    std::vector<std::vector<double>> errors(n_rungs, std::vector<double>(m));
    std::vector<std::vector<double>> limits(n_rungs, std::vector<double>(m));
    std::vector<std::vector<double>> statistics(n_rungs, std::vector<double>(m));
    simulate_batch(plan.model, sampling, plan.base_seed, m,
                   [&](std::size_t k, const PathBundle& path) {
                       for (std::size_t rung = 0; rung < n_rungs; ++rung) {
                           const double delta = plan.delta_ladder[rung];
                           const PathEval eval = evaluate_at(fn, plan.model, path, delta, plan.t_eval,
                                                             levy_h[rung], false);
                           errors[rung][k] = eval.statistic - eval.center;
                           limits[rung][k] = eval.center;
                           statistics[rung][k] = eval.statistic;
                       }
                   },
                   plan.jobs);

    report.rungs.resize(n_rungs);
    std::vector<double> log2_delta, log2_rmse;
    for (std::size_t rung = 0; rung < n_rungs; ++rung) {
        RungReport& r = report.rungs[rung];
        r.delta_n = plan.delta_ladder[rung];
        r.mean_error = stats::mean(errors[rung]);
        r.mean_limit = stats::mean(limits[rung]);
        r.mean_statistic = stats::mean(statistics[rung]);
        stats::CompensatedSum sq;
        for (double e : errors[rung]) sq.add(e * e);
        r.rmse = std::sqrt(sq.value() / static_cast<double>(m));
        // regression against log2(1/delta): RMSE ~ delta^{1/2} fits slope -1/2
        if (r.rmse > 0.0) {
            log2_delta.push_back(std::log2(1.0 / r.delta_n));
            log2_rmse.push_back(std::log2(r.rmse));
        }
    }
    if (log2_delta.size() >= 2) {
        const stats::LineFit fit = stats::fit_line(log2_delta, log2_rmse);
        RateFitReport rate;
        rate.slope = fit.slope;
        rate.slope_stderr = fit.slope_stderr;
        rate.intercept = fit.intercept;
        rate.degenerate = fit.degenerate || log2_delta.size() < n_rungs;
        report.rate = rate;
    } else if (n_rungs >= 2) {
        RateFitReport rate;  // all rungs exactly representable: no spread to fit
        rate.degenerate = true;
        report.rate = rate;
    }

    if (plan.bands.max_rel_err || plan.bands.slope_band) report.bands_checked = true;
    if (plan.bands.max_rel_err) {
        const RungReport& finest = report.rungs.back();
        const double denom = std::max(std::abs(finest.mean_limit), 1e-300);
        const double rel = std::abs(finest.mean_error) / denom;
        if (rel > *plan.bands.max_rel_err)
            report.band_failures.push_back(
                band_failure("relative error", rel, "<= " + std::to_string(*plan.bands.max_rel_err)));
    }
    if (plan.bands.slope_band) {
        if (!report.rate || report.rate->degenerate) {
            report.band_failures.push_back("slope band requested but fit is degenerate");
        } else if (report.rate->slope < plan.bands.slope_band->first ||
                   report.rate->slope > plan.bands.slope_band->second) {
            report.band_failures.push_back(
                band_failure("rate slope", report.rate->slope, format_pair(*plan.bands.slope_band)));
        }
    }
    report.bands_pass = report.band_failures.empty();
    return report;
}

TheoremReport run_clt(const ExperimentPlan& plan) {
    const auto problems = plan.validate();
    if (!problems.empty()) throw std::invalid_argument("run_clt: " + problems.front());
    if (plan.replicates < 100)
        throw std::invalid_argument("run_clt: replicates must be >= 100 for the KS check");
    const Functional& fn = plan.functionals.front();
    if (plan.feasible_variance && fn.theorem != Theorem::T6p)
        throw std::invalid_argument("run_clt: feasible studentization is only wired for T6p");

    TheoremReport report;
    report.label = fn.label();
    try {
        check_admissible(fn, plan.model);
    } catch (const AdmissibilityError& error) {
        refuse_report(report, error);
        return report;
    }

    const double delta = plan.delta_ladder.back();
    const SamplingSpec sampling = plan.sampling();
    const std::size_t m = plan.replicates;
    double levy_h = 0.0;
    if (needs_levy_compensator(fn.theorem))
        levy_h = levy_increment_expectation(plan.model, apply_psi(*fn.f, fn.psi_eta), delta).value;

    std::vector<double> z(m), variances(m), limits(m), errors(m);
    std::vector<std::string> degenerate_paths(m);
    simulate_batch(plan.model, sampling, plan.base_seed, m,
                   [&](std::size_t k, const PathBundle& path) {
                       const PathEval eval =
                           evaluate_at(fn, plan.model, path, delta, plan.t_eval, levy_h, true);
                       double variance = eval.variance;
                       if (plan.feasible_variance) {
                           // 2 * int c^2 du estimated by truncated fourth powers / (3 delta)
                           const auto incs = restrict_to_observations(path, delta);
                           const double threshold = fn.trunc->threshold(delta);
                           const auto last = static_cast<std::size_t>(
                               std::floor(terminal_obs_time(plan.t_eval, delta) / delta + 1e-12));
                           double quarticity = 0.0;
                           for (std::size_t i = 0; i < std::min(last, incs.size()); ++i) {
                               const double dx = incs[i];
                               if (std::abs(dx) <= threshold) quarticity += dx * dx * dx * dx;
                           }
                           variance = 2.0 * quarticity / (3.0 * delta);
                       }
                       variances[k] = variance;
                       limits[k] = eval.center;
                       errors[k] = eval.statistic - eval.center;
                       if (variance <= 0.0) {
                           degenerate_paths[k] = "degenerate variance (0) on replicate " + std::to_string(k);
                           z[k] = 0.0;
                           return;
                       }
                       z[k] = errors[k] / (clt_scale(fn.theorem, delta) * std::sqrt(variance));
                   },
                   plan.jobs);
    for (const std::string& dp : degenerate_paths)
        if (!dp.empty())
            throw AdmissibilityError("variance > 0", 0.0,
                                     "run_clt: standardization refused: " + dp);

    CltBlock block;
    block.m = m;
    block.z = z;
    block.z_mean = stats::mean(z);
    block.z_variance = stats::variance(z);
    block.mean_limit = stats::mean(limits);
    block.mean_variance = stats::mean(variances);
    const stats::KsResult ks = stats::ks_distance(z);
    block.ks_distance = ks.distance;
    block.ks_p = ks.p_value;
    report.clt = block;

    RungReport rung;
    rung.delta_n = delta;
    rung.mean_error = stats::mean(errors);
    stats::CompensatedSum sq;
    for (double e : errors) sq.add(e * e);
    rung.rmse = std::sqrt(sq.value() / static_cast<double>(m));
    rung.mean_limit = block.mean_limit;
    rung.mean_statistic = rung.mean_limit + rung.mean_error;
    report.rungs.push_back(rung);

    if (plan.bands.var_band || plan.bands.min_ks_p) report.bands_checked = true;
    if (plan.bands.var_band &&
        (block.z_variance < plan.bands.var_band->first || block.z_variance > plan.bands.var_band->second))
        report.band_failures.push_back(
            band_failure("z variance", block.z_variance, format_pair(*plan.bands.var_band)));
    if (plan.bands.min_ks_p && block.ks_p < *plan.bands.min_ks_p)
        report.band_failures.push_back(
            band_failure("KS p", block.ks_p, ">= " + std::to_string(*plan.bands.min_ks_p)));
    report.bands_pass = report.band_failures.empty();
    return report;
}

CovarianceReport run_covariance_pair(const ExperimentPlan& plan) {
    const auto problems = plan.validate();
    if (!problems.empty()) throw std::invalid_argument("run_covariance_pair: " + problems.front());
    if (plan.functionals.size() != 2)
        throw std::invalid_argument("run_covariance_pair: plan needs exactly two functionals");
    const Functional& fj = plan.functionals[0];
    const Functional& fk = plan.functionals[1];

    CovarianceReport report;
    report.label_j = fj.label();
    report.label_k = fk.label();
    try {
        const double s = activity_index(plan.model);
        const bool continuous = plan.model.jumps.kind == JumpKind::None;
        for (const Functional& fn : {fj, fk}) {
            check_admissible(fn, plan.model);
            // joint-CLT hypothesis block per component class; the J1/J3
            // activity bounds are strict here, unlike the single-component
            // theorems
            RegionCheck check;
            switch (j_class_of(fn.theorem)) {
                case JClass::J1:
                    check = clt_region_check(Theorem::T5, s, 0.0, continuous);
                    if (!continuous && s >= 1.0) {
                        check.clt_holds = false;
                        check.condition = "s < 1";
                    }
                    break;
                case JClass::J2:
                    check = clt_region_check(Theorem::T6, s, fn.f->r(), continuous);
                    break;
                case JClass::J3:
                    check = clt_region_check(Theorem::T6p, s, fn.trunc->varpi, continuous);
                    if (!continuous && check.clt_holds &&
                        s >= (4.0 * fn.trunc->varpi - 1.0) / (2.0 * fn.trunc->varpi)) {
                        check.clt_holds = false;
                        check.condition = "s < (4*varpi - 1)/(2*varpi)";
                    }
                    break;
                default:
                    check.clt_holds = true;
                    break;
            }
            if (!check.clt_holds)
                throw AdmissibilityError(check.condition, check.degenerate_exponent,
                                         "joint CLT refused for " + fn.label() + ": violated \"" +
                                             check.condition + "\"");
        }
    } catch (const AdmissibilityError& error) {
        report.admissible = false;
        report.refusal = error.what();
        return report;
    }

    const double delta = plan.delta_ladder.back();
    const SamplingSpec sampling = plan.sampling();
    const std::size_t m = plan.replicates;
    const double scale = std::sqrt(delta);

    std::vector<double> ej(m), ek(m), targets(m), var_j(m), var_k(m);
    simulate_batch(plan.model, sampling, plan.base_seed, m,
                   [&](std::size_t k, const PathBundle& path) {
                       const PathEval a =
                           evaluate_at(fj, plan.model, path, delta, plan.t_eval, 0.0, true);
                       const PathEval b =
                           evaluate_at(fk, plan.model, path, delta, plan.t_eval, 0.0, true);
                       ej[k] = (a.statistic - a.center) / scale;
                       ek[k] = (b.statistic - b.center) / scale;
                       const double t_obs = terminal_obs_time(plan.t_eval, delta);
                       targets[k] = covariance_target(fj, fk, plan.model, path, t_obs);
                       var_j[k] = a.variance;
                       var_k[k] = b.variance;
                   },
                   plan.jobs);

    report.m = m;
    report.empirical_cov = stats::covariance(ej, ek);
    report.theoretical_cov = stats::mean(targets);
    report.empirical_var_j = stats::variance(ej);
    report.empirical_var_k = stats::variance(ek);
    report.theoretical_var_j = stats::mean(var_j);
    report.theoretical_var_k = stats::mean(var_k);
    // Var(sample cov) ~ (var_j var_k + cov^2)/(m-1) under joint normality
    report.standard_error = std::sqrt(
        (report.empirical_var_j * report.empirical_var_k + report.empirical_cov * report.empirical_cov) /
        static_cast<double>(m - 1));

    if (plan.bands.cov_se_multiple) {
        report.bands_checked = true;
        const double gap = std::abs(report.empirical_cov - report.theoretical_cov);
        if (gap > *plan.bands.cov_se_multiple * report.standard_error)
            report.band_failures.push_back(band_failure(
                "covariance gap", gap,
                "<= " + std::to_string(*plan.bands.cov_se_multiple) + " * SE=" +
                    std::to_string(report.standard_error)));
        report.bands_pass = report.band_failures.empty();
    }
    return report;
}

stats::KsResult ks_distance(std::span<const double> samples) { return stats::ks_distance(samples); }

}  // namespace powvar
