#include "powvar/limits.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "powvar/quadrature.hpp"
#include "powvar/rng.hpp"

namespace powvar {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool is_continuous_model(const ModelSpec& spec) { return spec.jumps.kind == JumpKind::None; }

bool vanishes_relative_x2(const TestFunction& f) {
    if (f.is_bounded()) return true;
    return f.kind() == FuncKind::Power && f.r() < 2.0;
}

// rho integrand along the path; constant vol short-circuits, stochastic vol
// goes through a Chebyshev table of sigma -> value (the map is smooth).
double integrate_rho_along_path(const std::function<double(double)>& value_of_sigma,
                                const ModelSpec& spec, const PathBundle& path, double t) {
    if (spec.vol.kind == VolKind::Constant) {
        const double t_end = std::min(t, path.horizon);
        return value_of_sigma(spec.vol.sigma0) * t_end;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double c : path.c) {
        const double sigma = std::sqrt(c);
        lo = std::min(lo, sigma);
        hi = std::max(hi, sigma);
    }
    if (!(hi > lo)) return value_of_sigma(lo) * std::min(t, path.horizon);
    const quad::ChebyshevInterp table(value_of_sigma, lo, hi, 1e-10);
    return integrate_of_sigma(path, [&table](double sigma) { return table(sigma); }, t);
}

// Cumulative trapezoid of value_of_sigma(sigma_u) sampled at the observation
// times, in one pass over the fine grid.
FunctionalSeries cumulative_rho_series(const std::function<double(double)>& value_of_sigma,
                                       const ModelSpec& spec, const PathBundle& path, double delta_n,
                                       std::string meta) {
    const auto n_obs = static_cast<std::size_t>(std::llround(path.horizon / delta_n));
    FunctionalSeries series;
    series.delta_n = delta_n;
    series.meta = std::move(meta);
    series.times.resize(n_obs + 1);
    series.values.resize(n_obs + 1);
    for (std::size_t i = 0; i <= n_obs; ++i) series.times[i] = i * delta_n;

    if (spec.vol.kind == VolKind::Constant) {
        const double v = value_of_sigma(spec.vol.sigma0);
        for (std::size_t i = 0; i <= n_obs; ++i) series.values[i] = v * series.times[i];
        return series;
    }

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double c : path.c) {
        const double sigma = std::sqrt(c);
        lo = std::min(lo, sigma);
        hi = std::max(hi, sigma);
    }
    const quad::ChebyshevInterp table(value_of_sigma, lo, hi, 1e-10);
    const auto stride = static_cast<std::size_t>(std::llround(delta_n / path.fine_step));
    double acc = 0.0;
    double prev = table(std::sqrt(path.c[0]));
    std::size_t obs = 0;
    series.values[0] = 0.0;
    for (std::size_t k = 1; k < path.c.size(); ++k) {
        const double cur = table(std::sqrt(path.c[k]));
        acc += 0.5 * (prev + cur) * (path.grid[k] - path.grid[k - 1]);
        prev = cur;
        if (stride > 0 && k % stride == 0 && obs + 1 <= n_obs) series.values[++obs] = acc;
    }
    while (obs < n_obs) series.values[++obs] = acc;
    return series;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

std::string theorem_name(Theorem thm) {
    switch (thm) {
        case Theorem::T1a: return "T1a";
        case Theorem::T1b: return "T1b";
        case Theorem::T1c: return "T1c";
        case Theorem::T2: return "T2";
        case Theorem::T3i: return "T3i";
        case Theorem::T3ii: return "T3ii";
        case Theorem::T3iii: return "T3iii";
        case Theorem::T4: return "T4";
        case Theorem::T5: return "T5";
        case Theorem::T6: return "T6";
        case Theorem::T6p: return "T6p";
        case Theorem::T7i: return "T7i";
        case Theorem::T7ii: return "T7ii";
    }
    return "?";
}

std::optional<Theorem> theorem_from_name(const std::string& name) {
    static const std::pair<const char*, Theorem> table[] = {
        {"T1a", Theorem::T1a},   {"T1b", Theorem::T1b}, {"T1c", Theorem::T1c}, {"T2", Theorem::T2},
        {"T3i", Theorem::T3i},   {"T3ii", Theorem::T3ii}, {"T3iii", Theorem::T3iii},
        {"T4", Theorem::T4},     {"T5", Theorem::T5},   {"T6", Theorem::T6},   {"T6p", Theorem::T6p},
        {"T6'", Theorem::T6p},   {"T7i", Theorem::T7i}, {"T7ii", Theorem::T7ii},
    };
    for (const auto& [key, thm] : table)
        if (name == key) return thm;
    return std::nullopt;
}

std::string Functional::label() const {
    std::string out = theorem_name(theorem);
    if (f) out += ":" + f->name();
    if (trunc) out += ":trunc(varpi=" + format_double(trunc->varpi) + ",alpha=" + format_double(trunc->alpha) + ")";
    return out;
}

double rate_exponent_eta(double s, double r) {
    return (2.0 - s) * (1.0 + r) * (2.0 - r) / (4.0 + 2.0 * s * (1.0 - r));
}

RegionCheck clt_region_check(Theorem thm, double s, double r_or_varpi, bool continuous_model) {
    if (s < 0.0 || s > 2.0) throw std::invalid_argument("clt_region_check: s must be in [0, 2]");
    RegionCheck check;
    switch (thm) {
        case Theorem::T5: {
            check.condition = "s <= 1";
            check.clt_holds = continuous_model || s <= 1.0;
            check.degenerate_exponent = check.clt_holds ? 0.5 : 1.0 - 0.5 * s;
            return check;
        }
        case Theorem::T6: {
            const double r = r_or_varpi;
            if (!(r > 0.0)) throw std::invalid_argument("clt_region_check: r must be > 0");
            check.condition = "r <= (1 - sqrt(3*s^2 - 8*s + 5))/(2 - s)";
            if (continuous_model) {
                check.clt_holds = true;
                check.degenerate_exponent = 0.5;
                return check;
            }
            if (r > 1.0) throw std::invalid_argument("clt_region_check: T6 needs r in (0, 1]");
            const bool low_activity = s <= 2.0 / 3.0 && r < 1.0;
            const double disc = 3.0 * s * s - 8.0 * s + 5.0;
            const double r_lower = disc >= 0.0 ? (1.0 - std::sqrt(disc)) / (2.0 - s) : kNan;
            const bool mid_activity = s > 2.0 / 3.0 && s < 1.0 && r > r_lower && r < 1.0;
            check.clt_holds = low_activity || mid_activity;
            if (check.clt_holds) {
                check.degenerate_exponent = 0.5;
            } else if (r == 1.0 && s <= 1.0) {
                check.degenerate_exponent = 0.5;  // O_Pu(sqrt(Delta)) tightness, not a CLT
            } else {
                check.degenerate_exponent = rate_exponent_eta(s, r);
            }
            return check;
        }
        case Theorem::T6p: {
            const double varpi = r_or_varpi;
            if (!(varpi > 0.0 && varpi < 0.5))
                throw std::invalid_argument("clt_region_check: varpi must be in (0, 1/2)");
            check.condition = "s <= (4*varpi - 1)/(2*varpi)";
            const double bound = (4.0 * varpi - 1.0) / (2.0 * varpi);
            const double s_eff = continuous_model ? 0.0 : s;
            check.clt_holds = s_eff <= bound;
            check.degenerate_exponent = check.clt_holds ? 0.5 : (2.0 - s_eff) * varpi;
            return check;
        }
        default:
            throw std::invalid_argument("clt_region_check: no region condition for " + theorem_name(thm));
    }
}

void check_admissible(const Functional& fn, const ModelSpec& spec) {
    const HypothesisProfile profile = hypothesis_profile(spec);
    const bool continuous = is_continuous_model(spec);
    const double s = activity_index(spec);
    auto refuse = [&](const std::string& condition, double exponent) {
        throw AdmissibilityError(condition, exponent,
                                 theorem_name(fn.theorem) + " refused for " + fn.label() +
                                     ": violated \"" + condition + "\" (s=" + format_double(s) + ")");
    };
    auto need_f = [&]() -> const TestFunction& {
        if (!fn.f) throw std::invalid_argument(theorem_name(fn.theorem) + " needs a test function");
        return *fn.f;
    };
    auto need_trunc = [&]() -> const TruncationSpec& {
        if (!fn.trunc) throw std::invalid_argument(theorem_name(fn.theorem) + " needs a truncation spec");
        return *fn.trunc;
    };
    auto region_gate = [&](double param) {
        const RegionCheck check = clt_region_check(fn.theorem, s, param, continuous);
        if (!check.clt_holds) refuse(check.condition, check.degenerate_exponent);
    };

    switch (fn.theorem) {
        case Theorem::T1a:
        case Theorem::T1b:
        case Theorem::T1c:
            need_f();
            return;  // case selection happens in limit_target_t1
        case Theorem::T2: {
            const TestFunction& f = need_f();
            if (spec.jumps.kind != JumpKind::CompoundPoisson)
                refuse("compensator computable only for compound_poisson (Levy) models", kNan);
            if (!f.is_continuous() || !(f.r() > 1.0 && f.r() <= 2.0))
                refuse("f in E''_r for some r in (1,2)", kNan);
            if (!f.is_bounded() && std::isinf(fn.psi_eta)) refuse("eta < inf unless f is bounded", kNan);
            return;
        }
        case Theorem::T3i: {
            const TestFunction& g = need_f();
            if (!g.is_continuous()) refuse("T3(i) needs a continuous g", kNan);
            if (!continuous && !vanishes_relative_x2(g)) refuse("g(x)/x^2 -> 0 as |x| -> inf", kNan);
            return;
        }
        case Theorem::T3ii: {
            const TestFunction& f = need_f();
            if (!(f.r() > 0.0 && f.r() < 2.0) || !in_class(f, FuncClass::EquivalentAtZero, f.r()))
                refuse("f in E'_r with r in (0,2)", kNan);
            return;
        }
        case Theorem::T3iii:
            need_trunc();
            return;
        case Theorem::T4: {
            const TestFunction& f = need_f();
            if (!in_class(f, FuncClass::EquivalentAtZero, 1.0) || !f.is_continuous())
                refuse("f in E'_1", kNan);
            if (spec.jumps.kind != JumpKind::None && spec.jumps.kind != JumpKind::CompoundPoisson)
                refuse("compensator computable only for Levy models", kNan);
            if (spec.drift.kind != DriftKind::Constant || spec.vol.kind != VolKind::Constant)
                refuse("compensator computable only for Levy models", kNan);
            if (!f.is_bounded() && std::isinf(fn.psi_eta)) refuse("eta < inf unless f is bounded", kNan);
            return;
        }
        case Theorem::T5: {
            const TestFunction& g = need_f();
            if (continuous) {
                if (!g.is_c1()) refuse("g is C^1 and even with g' of polynomial growth", kNan);
            } else if (!g.is_c2b()) {
                refuse("g is an even C^2_b function", kNan);
            }
            region_gate(0.0);
            return;
        }
        case Theorem::T6: {
            const TestFunction& f = need_f();
            if (!in_class(f, FuncClass::EqualsNearZero, f.r())) refuse("f in E_r", kNan);
            if (!continuous && !(f.r() > 0.0 && f.r() <= 1.0)) refuse("r in (0,1]", kNan);
            if (!profile.h_prime && (!continuous || f.r() <= 1.0)) refuse("(H'): inf c > 0", kNan);
            region_gate(f.r());
            return;
        }
        case Theorem::T6p:
            region_gate(need_trunc().varpi);
            return;
        case Theorem::T7i: {
            const TestFunction& f = need_f();
            const bool smooth_enough =
                (f.kind() == FuncKind::Power || f.kind() == FuncKind::PowerCutoff) && f.r() > 3.0;
            if (!smooth_enough) refuse("f C^2 near 0 with f(0)=f'(0)=0 and f''(x) = o(|x|)", kNan);
            return;
        }
        case Theorem::T7ii: {
            const TestFunction& f = need_f();
            if (!in_class(f, FuncClass::EqualsNearZero, 2.0) || !f.is_c1())
                refuse("f in E_2 and C^1", kNan);
            if (!profile.satisfies_l(2.0)) refuse("(L-2)", kNan);
            return;
        }
    }
}

double integral_of_rho(const TestFunction& g, const ModelSpec& spec, const PathBundle& path,
                       double t) {
    const TestFunction g_copy = g;
    return integrate_rho_along_path([g_copy](double sigma) { return rho(g_copy, sigma); }, spec, path,
                                    t);
}

double integral_m_r_c(double r, const ModelSpec& spec, const PathBundle& path, double t) {
    const double m_r = abs_moment(r);
    if (spec.vol.kind == VolKind::Constant)
        return m_r * std::pow(spec.vol.sigma0, r) * std::min(t, path.horizon);
    return m_r * integrate_c_power(path, 0.5 * r, t);
}

FunctionalSeries lln_limit(const Functional& fn, const ModelSpec& spec, const PathBundle& path,
                           double delta_n) {
    check_admissible(fn, spec);
    switch (fn.theorem) {
        case Theorem::T1a:
        case Theorem::T1b:
        case Theorem::T1c:
            return limit_target_t1(*fn.f, spec, path, delta_n);
        case Theorem::T2:
            return t2_limit_compound_poisson(*fn.f, fn.psi_eta, spec, path, delta_n);
        case Theorem::T3i:
        case Theorem::T3ii:
        case Theorem::T3iii: {
            std::function<double(double)> density;  // of sigma
            if (fn.theorem == Theorem::T3i) {
                const TestFunction g = *fn.f;
                density = [g](double sigma) { return rho(g, sigma); };
            } else if (fn.theorem == Theorem::T3ii) {
                const double r = fn.f->r();
                const double m_r = abs_moment(r);
                density = [m_r, r](double sigma) { return m_r * std::pow(sigma, r); };
            } else {
                density = [](double sigma) { return sigma * sigma; };
            }
            return cumulative_rho_series(density, spec, path, delta_n, "lln_limit[" + fn.label() + "]");
        }
        default:
            throw std::invalid_argument("lln_limit: " + theorem_name(fn.theorem) + " is not an LLN");
    }
}

double clt_variance(const Functional& fn, const ModelSpec& spec, const PathBundle& path, double t) {
    check_admissible(fn, spec);
    switch (fn.theorem) {
        case Theorem::T4:
            return integrate_rho_along_path(
                [](double sigma) { return (1.0 - 2.0 / 3.14159265358979323846) * sigma * sigma; }, spec,
                path, t);
        case Theorem::T5: {
            const TestFunction g = *fn.f;
            auto integrand = [g](double sigma) {
                const double mean = rho(g, sigma);
                const double second = rho_raw([&g](double x) { const double v = g(x); return v * v; },
                                              sigma);
                return second - mean * mean;
            };
            return integrate_rho_along_path(integrand, spec, path, t);
        }
        case Theorem::T3ii:  // the CLT attached to the T3(ii) LLN is T6's
        case Theorem::T6: {
            const double r = fn.f->r();
            const double coefficient = abs_moment(2.0 * r) - abs_moment(r) * abs_moment(r);
            return coefficient * integrate_c_power(path, r, t);
        }
        case Theorem::T3iii:  // likewise T6' for the truncated variance
        case Theorem::T6p:
            return 2.0 * integrate_c_power(path, 2.0, t);
        case Theorem::T7i:
            return z_conditional_variance(fn.f->derivative(), path, t);
        case Theorem::T7ii:
            return z_conditional_variance(fn.f->derivative(), path, t) +
                   2.0 * integrate_c_power(path, 2.0, t);
        default:
            throw std::invalid_argument("clt_variance: " + theorem_name(fn.theorem) + " has no CLT");
    }
}

ZLawSample sample_z_law(const std::function<double(double)>& g, const PathBundle& path,
                        std::uint64_t seed, double t) {
    if (!path.jump_record_complete)
        throw std::invalid_argument("sample_z_law: jump record is not exhaustive (stable_like path)");
    ZLawSample sample;
    Rng rng(seed);
    for (const JumpRecordEntry& jump : path.jumps) {
        if (jump.time > t) break;
        if (!(jump.c_left >= 0.0) || !(jump.c_right >= 0.0))
            throw std::invalid_argument("sample_z_law: jump record is missing c_left/c_right");
        const double kappa = rng.uniform();
        const double u = rng.normal();
        const double u_prime = rng.normal();
        const double contribution =
            g(jump.size) * (std::sqrt(kappa) * u * std::sqrt(jump.c_left) +
                            std::sqrt(1.0 - kappa) * u_prime * std::sqrt(jump.c_right));
        sample.per_jump.emplace_back(jump.time, contribution);
        sample.value += contribution;
    }
    return sample;
}

double z_conditional_variance(const std::function<double(double)>& g, const PathBundle& path,
                              double t) {
    double acc = 0.0;
    for (const JumpRecordEntry& jump : path.jumps) {
        if (jump.time > t) break;
        const double gj = g(jump.size);
        acc += gj * gj * (jump.c_left + 0.5 * (jump.c_right - jump.c_left));
    }
    return acc;
}

double expect_of_jump_size(const JumpSizeSpec& size, const std::function<double(double)>& g,
                           std::vector<double> breakpoints) {
    switch (size.kind) {
        case JumpSizeKind::Fixed:
            return g(size.value);
        case JumpSizeKind::Gaussian: {
            const double s = std::sqrt(size.variance);
            const double norm = 1.0 / (s * 2.5066282746310005024);
            auto integrand = [&](double x) {
                const double z = (x - size.mean) / s;
                return g(x) * norm * std::exp(-0.5 * z * z);
            };
            return quad::integrate_with_breakpoints(integrand, size.mean - 10.0 * s,
                                                    size.mean + 10.0 * s, breakpoints, 1e-11);
        }
        case JumpSizeKind::DoubleExponential: {
            const double ep = size.eta_plus, em = size.eta_minus;
            auto integrand = [&](double x) {
                const double density =
                    x > 0 ? 0.5 * std::exp(-x / ep) / ep : 0.5 * std::exp(x / em) / em;
                return g(x) * density;
            };
            breakpoints.push_back(0.0);
            const double span = 45.0 * std::max(ep, em);
            return quad::integrate_with_breakpoints(integrand, -span, span, breakpoints, 1e-11);
        }
    }
    return 0.0;
}

FunctionalSeries t2_limit_compound_poisson(const TestFunction& f, double eta, const ModelSpec& spec,
                                           const PathBundle& path, double delta_n) {
    if (spec.jumps.kind == JumpKind::None) {
        // nu = 0: both the jump sum and the compensator vanish
        FunctionalSeries series = jump_functional(f, path, delta_n);
        series.meta = "t2_limit[" + f.name() + "]";
        return series;
    }
    if (spec.jumps.kind != JumpKind::CompoundPoisson)
        throw std::invalid_argument("t2_limit_compound_poisson: model must be compound_poisson");
    const CutoffPsi psi{eta};
    std::vector<double> breakpoints = {0.0};
    if (!std::isinf(eta)) {
        breakpoints.push_back(eta);
        breakpoints.push_back(-eta);
        breakpoints.push_back(2.0 * eta);
        breakpoints.push_back(-2.0 * eta);
    }
    const double compensator_rate =
        spec.jumps.rate *
        expect_of_jump_size(spec.jumps.size, [&](double x) { return f(x) * psi(x); }, breakpoints);
    FunctionalSeries series = jump_functional(f, path, delta_n);
    series.meta = "t2_limit[" + f.name() + "]";
    for (std::size_t i = 0; i < series.times.size(); ++i)
        series.values[i] -= compensator_rate * series.times[i];
    return series;
}

JClass j_class_of(Theorem thm) {
    switch (thm) {
        case Theorem::T5: return JClass::J1;
        case Theorem::T3ii:
        case Theorem::T6: return JClass::J2;
        case Theorem::T3iii:
        case Theorem::T6p: return JClass::J3;
        case Theorem::T7i: return JClass::J4;
        case Theorem::T7ii: return JClass::J5;
        default:
            throw std::invalid_argument("no T8 component class for " + theorem_name(thm));
    }
}

double r_of_component(const Functional& fn) {
    switch (j_class_of(fn.theorem)) {
        case JClass::J2: return fn.f->r();
        case JClass::J3:
        case JClass::J5: return 2.0;
        default: return kNan;
    }
}

double covariance_target(const Functional& a, const Functional& b, const ModelSpec& spec,
                         const PathBundle& path, double t) {
    const JClass ja = j_class_of(a.theorem);
    const JClass jb = j_class_of(b.theorem);
    const bool a_brownian = ja != JClass::J4;
    const bool b_brownian = jb != JClass::J4;
    const bool a_jump = ja == JClass::J4 || ja == JClass::J5;
    const bool b_jump = jb == JClass::J4 || jb == JClass::J5;

    double total = 0.0;
    if (a_brownian && b_brownian) {
        if (ja == JClass::J1 && jb == JClass::J1) {
            const TestFunction fa = *a.f, fb = *b.f;
            auto integrand = [fa, fb](double sigma) {
                const double cross =
                    rho_raw([&](double x) { return fa(x) * fb(x); }, sigma);
                return cross - rho(fa, sigma) * rho(fb, sigma);
            };
            total += integrate_rho_along_path(integrand, spec, path, t);
        } else if (ja != JClass::J1 && jb != JClass::J1) {
            const double ra = r_of_component(a), rb = r_of_component(b);
            const double coefficient = abs_moment(ra + rb) - abs_moment(ra) * abs_moment(rb);
            total += coefficient * integrate_c_power(path, 0.5 * (ra + rb), t);
        } else {
            const Functional& power_side = ja == JClass::J1 ? b : a;
            const Functional& smooth_side = ja == JClass::J1 ? a : b;
            const double rp = r_of_component(power_side);
            const TestFunction fk = *smooth_side.f;
            const TestFunction hr = TestFunction::power(rp);
            auto integrand = [fk, hr, rp](double sigma) {
                const double cross = rho_raw(
                    [&](double x) { return hr(x) * fk(x); }, sigma);
                return cross - abs_moment(rp) * std::pow(sigma, rp) * rho(fk, sigma);
            };
            total += integrate_rho_along_path(integrand, spec, path, t);
        }
    }
    if (a_jump && b_jump) {
        const auto ga = a.f->derivative();
        const auto gb = b.f->derivative();
        for (const JumpRecordEntry& jump : path.jumps) {
            if (jump.time > t) break;
            total += ga(jump.size) * gb(jump.size) *
                     (jump.c_left + 0.5 * (jump.c_right - jump.c_left));
        }
    }
    return total;
}

}  // namespace powvar
