#include "powvar/functionals.hpp"

#include <cmath>
#include <stdexcept>

#include "powvar/quadrature.hpp"

namespace powvar {

namespace {

FunctionalSeries running_sum(std::span<const double> terms, double delta_n, std::string meta) {
    FunctionalSeries series;
    series.delta_n = delta_n;
    series.meta = std::move(meta);
    series.times.resize(terms.size() + 1);
    series.values.resize(terms.size() + 1);
    series.times[0] = 0.0;
    series.values[0] = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        acc += terms[i];
        series.times[i + 1] = (i + 1) * delta_n;
        series.values[i + 1] = acc;
    }
    return series;
}

}  // namespace

double FunctionalSeries::at_time(double t) const {
    if (values.empty()) return 0.0;
    if (delta_n <= 0.0) return values.back();
    auto idx = static_cast<std::size_t>(std::floor(t / delta_n + 1e-12));
    idx = std::min(idx, values.size() - 1);
    return values[idx];
}

FunctionalSeries v_n(const TestFunction& f, std::span<const double> increments, double delta_n) {
    std::vector<double> terms(increments.size());
    for (std::size_t i = 0; i < increments.size(); ++i) terms[i] = f(increments[i]);
    return running_sum(terms, delta_n, "v_n[" + f.name() + "]");
}

FunctionalSeries v_prime_n(const TestFunction& f, std::span<const double> increments, double delta_n) {
    if (!(delta_n > 0.0)) throw std::invalid_argument("v_prime_n: delta_n must be > 0");
    if (f.kind() == FuncKind::Power) {
        // factored form keeps the scaling identity with v_n exact
        FunctionalSeries series = v_n(f, increments, delta_n);
        const double scale = std::pow(delta_n, -0.5 * f.r());
        for (double& v : series.values) v *= scale;
        series.meta = "v_prime_n[" + f.name() + "]";
        return series;
    }
    const double root = std::sqrt(delta_n);
    std::vector<double> terms(increments.size());
    for (std::size_t i = 0; i < increments.size(); ++i) terms[i] = f(increments[i] / root);
    return running_sum(terms, delta_n, "v_prime_n[" + f.name() + "]");
}

FunctionalSeries v_trunc_n(const TruncationSpec& trunc, std::span<const double> increments,
                           double delta_n) {
    const auto problems = trunc.validate();
    if (!problems.empty()) throw std::invalid_argument("v_trunc_n: " + problems.front());
    const double threshold = trunc.threshold(delta_n);
    std::vector<double> terms(increments.size());
    for (std::size_t i = 0; i < increments.size(); ++i) {
        const double dx = increments[i];
        terms[i] = std::abs(dx) <= threshold ? dx * dx : 0.0;
    }
    FunctionalSeries series = running_sum(terms, delta_n, "v_trunc_n");
    return series;
}

FunctionalSeries jump_functional(const TestFunction& f, const PathBundle& path, double delta_n) {
    const std::size_t n_obs =
        delta_n > 0.0 ? static_cast<std::size_t>(std::llround(path.horizon / delta_n)) : 0;
    FunctionalSeries series;
    series.delta_n = delta_n;
    series.meta = "jump_functional[" + f.name() + "]";
    series.biased_below_cutoff = !path.jump_record_complete;
    series.times.resize(n_obs + 1);
    series.values.resize(n_obs + 1);
    std::size_t next = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i <= n_obs; ++i) {
        const double t = i * delta_n;
        while (next < path.jumps.size() && path.jumps[next].time <= t + 1e-15) {
            acc += f(path.jumps[next].size);
            ++next;
        }
        series.times[i] = t;
        series.values[i] = acc;
    }
    return series;
}

double integrate_c_power(const PathBundle& path, double q, double t) {
    return integrate_of_sigma(path, [q](double sigma) { return std::pow(sigma * sigma, q); }, t);
}

double integrate_of_sigma(const PathBundle& path, const std::function<double(double)>& f_of_sigma,
                          double t) {
    if (path.c.size() < 2) return 0.0;
    const double h = path.fine_step;
    auto last = static_cast<std::size_t>(std::floor(t / h + 1e-9));
    last = std::min(last, path.c.size() - 1);
    double acc = 0.0;
    double prev = f_of_sigma(std::sqrt(path.c[0]));
    for (std::size_t k = 1; k <= last; ++k) {
        const double cur = f_of_sigma(std::sqrt(path.c[k]));
        acc += 0.5 * (prev + cur) * (path.grid[k] - path.grid[k - 1]);
        prev = cur;
    }
    return acc;
}

FunctionalSeries limit_target_t1(const TestFunction& f, const ModelSpec& spec, const PathBundle& path,
                                 double delta_n) {
    if (!f.is_continuous())
        throw NoLlnTarget("limit_target_t1: " + f.name() + " is not continuous");
    const bool no_diffusion = spec.vol.kind == VolKind::Constant && spec.vol.sigma0 == 0.0;
    const double s_index = activity_index(spec);
    const bool one_in_i = spec.jumps.kind != JumpKind::StableLike || spec.jumps.beta < 1.0;

    enum class Case { JumpOnly, JumpPlusC, JumpPlusDrift } which;
    if (in_class(f, FuncClass::LittleO, 2.0)) {
        which = Case::JumpOnly;  // a-1
    } else if (in_class(f, FuncClass::EquivalentAtZero, 2.0)) {
        which = Case::JumpPlusC;  // b
    } else if (no_diffusion && in_class(f, FuncClass::EquivalentAtZero, 1.0) && one_in_i) {
        which = Case::JumpPlusDrift;  // c
    } else if (no_diffusion) {
        // a-2 / a-3 / a-4: f small enough at 0 relative to the jump activity
        const bool a2 = f.r() > 1.0 && f.r() < 2.0 && s_index < f.r() &&
                        in_class(f, FuncClass::BigO, f.r());
        const bool a3 = in_class(f, FuncClass::LittleO, 1.0) && one_in_i;
        const bool a4 = f.r() <= 1.0 && s_index < f.r() && in_class(f, FuncClass::BigO, f.r()) &&
                        spec.drift.kind == DriftKind::Constant && spec.drift.level == 0.0;
        if (a2 || a3 || a4)
            which = Case::JumpOnly;
        else
            throw NoLlnTarget("limit_target_t1: no LLN target for " + f.name() + " on this model");
    } else {
        throw NoLlnTarget("limit_target_t1: no LLN target for " + f.name() + " on this model");
    }

    FunctionalSeries series = jump_functional(f, path, delta_n);
    series.meta = "limit_target_t1[" + f.name() + "]";
    if (which == Case::JumpPlusC) {
        // running C_t in one pass over the fine grid
        const auto stride = static_cast<std::size_t>(std::llround(delta_n / path.fine_step));
        double acc = 0.0;
        std::size_t obs = 0;
        for (std::size_t k = 1; k < path.c.size() && obs + 1 < series.values.size(); ++k) {
            acc += 0.5 * (path.c[k - 1] + path.c[k]) * (path.grid[k] - path.grid[k - 1]);
            if (stride > 0 && k % stride == 0) series.values[++obs] += acc;
        }
        while (obs + 1 < series.values.size()) series.values[++obs] += acc;
    } else if (which == Case::JumpPlusDrift) {
        // v(B)_t = int |b_s| ds for the declared genuine drift
        if (spec.drift.kind == DriftKind::Constant) {
            for (std::size_t i = 0; i < series.times.size(); ++i)
                series.values[i] += std::abs(spec.drift.level) * series.times[i];
        } else {
            double acc = 0.0;
            for (std::size_t i = 1; i < series.times.size(); ++i) {
                acc += quad::integrate_adaptive(
                    [&spec](double u) { return std::abs(spec.drift(u)); }, series.times[i - 1],
                    series.times[i], 1e-12);
                series.values[i] += acc;
            }
        }
    }
    return series;
}

LevyExpectation levy_increment_expectation(const ModelSpec& spec, const TestFunction& f,
                                           double delta_n, double precision) {
    if (spec.drift.kind != DriftKind::Constant || spec.vol.kind != VolKind::Constant ||
        (spec.jumps.kind != JumpKind::CompoundPoisson && spec.jumps.kind != JumpKind::None))
        throw std::invalid_argument("levy_increment_expectation: model is not Levy "
                                    "(constant drift, constant vol, compound Poisson)");
    if (!f.is_bounded())
        throw std::invalid_argument("levy_increment_expectation: f must be bounded");
    if (!(delta_n > 0.0)) throw std::invalid_argument("levy_increment_expectation: delta_n must be > 0");

    const double drift_part = spec.drift.level * delta_n;
    const double sig = spec.vol.sigma0 * std::sqrt(delta_n);
    const double lam = spec.jumps.kind == JumpKind::CompoundPoisson ? spec.jumps.rate : 0.0;
    const double m = lam * delta_n;

    // E[f(mu + s U + S_k)] with S_k the k-fold jump-size convolution
    auto gauss_of = [&](const std::function<double(double)>& g, double mu, double s) {
        if (s == 0.0) return g(mu);
        // integrate against the N(mu, s^2) density with breakpoints at the
        // kinks of f (cusp at 0, cutoff corners)
        std::vector<double> pts = {0.0};
        if (f.kind() == FuncKind::PowerCutoff) {
            pts.push_back(f.eta());
            pts.push_back(-f.eta());
            pts.push_back(2.0 * f.eta());
            pts.push_back(-2.0 * f.eta());
        }
        if (f.kind() == FuncKind::SquareIndicator) {
            pts.push_back(f.threshold());
            pts.push_back(-f.threshold());
        }
        const double lo = mu - 10.0 * s, hi = mu + 10.0 * s;
        const double norm = 1.0 / (s * 2.5066282746310005024);
        auto integrand = [&](double x) {
            const double z = (x - mu) / s;
            return g(x) * norm * std::exp(-0.5 * z * z);
        };
        return quad::integrate_with_breakpoints(integrand, lo, hi, pts, precision * 0.1);
    };

    const JumpSizeSpec& size = spec.jumps.size;
    auto term_k = [&](int k) -> double {
        if (k == 0) return gauss_of([&f](double x) { return f(x); }, drift_part, sig);
        switch (size.kind) {
            case JumpSizeKind::Fixed:
                return gauss_of([&f](double x) { return f(x); }, drift_part + k * size.value, sig);
            case JumpSizeKind::Gaussian:
                // Gaussian sizes fold into the increment law exactly
                return gauss_of([&f](double x) { return f(x); }, drift_part + k * size.mean,
                                std::sqrt(sig * sig + k * size.variance));
            case JumpSizeKind::DoubleExponential: {
                // closed-form k-fold density (k <= 2), outer quadrature over it
                const double ep = size.eta_plus, em = size.eta_minus;
                auto density = [&](double x) -> double {
                    if (k == 1)
                        return x > 0 ? 0.5 * std::exp(-x / ep) / ep : 0.5 * std::exp(x / em) / em;
                    // k == 2: (+,+) Gamma(2), (-,-) mirrored, (+,-) and (-,+)
                    // asymmetric Laplace, quarter weight each
                    const double g_pos = x > 0 ? x * std::exp(-x / ep) / (ep * ep) : 0.0;
                    const double g_neg = x < 0 ? -x * std::exp(x / em) / (em * em) : 0.0;
                    const double al =
                        x > 0 ? (std::exp(-x / ep) + std::exp(-x / em)) / (ep + em)
                              : (std::exp(x / em) + std::exp(x / ep)) / (ep + em);
                    return 0.25 * (g_pos + g_neg) + 0.25 * al;
                };
                const double span = 45.0 * std::max(ep, em) * k;
                auto integrand = [&](double s_jump) {
                    return density(s_jump) *
                           gauss_of([&f](double x) { return f(x); }, drift_part + s_jump, sig);
                };
                return quad::integrate_with_breakpoints(integrand, -span, span, {0.0},
                                                        precision * 0.1);
            }
        }
        return 0.0;
    };

    LevyExpectation out;
    const double p0 = std::exp(-m);
    out.value = p0 * term_k(0);
    if (m > 0.0) {
        out.value += p0 * m * term_k(1);
        out.value += p0 * 0.5 * m * m * term_k(2);
    }
    const double tail_prob = m > 0.0 ? std::max(0.0, 1.0 - p0 * (1.0 + m + 0.5 * m * m)) : 0.0;
    out.error_bound = precision + tail_prob * f.bound();
    return out;
}

}  // namespace powvar
