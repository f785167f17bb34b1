#include "powvar/model.hpp"

#include <cmath>
#include <stdexcept>

namespace powvar {

std::size_t SamplingSpec::n_observations() const {
    return static_cast<std::size_t>(std::llround(horizon / delta_n));
}

std::vector<std::string> SamplingSpec::validate() const {
    std::vector<std::string> out;
    if (!(horizon > 0.0)) out.push_back("horizon must be > 0");
    if (!(delta_n > 0.0)) out.push_back("delta_n must be > 0");
    if (delta_n > horizon) out.push_back("delta_n must be <= horizon");
    if (refine < 1) out.push_back("refine must be >= 1");
    if (out.empty()) {
        const double steps = horizon / delta_n;
        if (std::llround(steps) < 1) out.push_back("floor(horizon/delta_n) must be >= 1");
        if (std::abs(steps - std::llround(steps)) > 1e-9 * std::max(1.0, steps))
            out.push_back("horizon must be an integer multiple of delta_n");
    }
    return out;
}

double DriftSpec::operator()(double t) const {
    switch (kind) {
        case DriftKind::Constant: return level;
        case DriftKind::Sine:
            return level + amplitude * std::sin(6.283185307179586 * frequency * t);
    }
    return level;
}

std::vector<std::string> ValidationReport::all() const {
    std::vector<std::string> out = errors;
    out.insert(out.end(), degenerate.begin(), degenerate.end());
    return out;
}

ValidationReport validate_model(const ModelSpec& spec) {
    ValidationReport report;
    auto err = [&report](const std::string& msg) { report.errors.push_back(msg); };

    if (!std::isfinite(spec.drift.level)) err("drift level must be finite");
    if (spec.drift.kind == DriftKind::Sine && !std::isfinite(spec.drift.amplitude))
        err("drift amplitude must be finite");

    const VolSpec& v = spec.vol;
    if (v.kind == VolKind::Constant) {
        if (v.sigma0 < 0.0) err("sigma0 must be > 0");
        else if (v.sigma0 == 0.0) report.degenerate.push_back("sigma0 must be > 0 (degenerate: no diffusion)");
    } else {
        if (!(v.sigma0 > 0.0)) err("sigma0 must be > 0");
        if (v.mean_reversion < 0.0) err("mean reversion must be >= 0");
        if (v.vol_of_vol < 0.0) err("vol-of-vol must be >= 0");
        if (v.leverage < -1.0 || v.leverage > 1.0) err("leverage rho must be in [-1, 1]");
    }
    if (v.kind == VolKind::ExpOuJump && spec.jumps.kind != JumpKind::CompoundPoisson)
        err("co-jumping vol requires compound_poisson jumps");

    const JumpSpec& j = spec.jumps;
    switch (j.kind) {
        case JumpKind::None: break;
        case JumpKind::CompoundPoisson:
            if (!(j.rate > 0.0)) err("compound_poisson rate must be > 0");
            switch (j.size.kind) {
                case JumpSizeKind::Fixed:
                    if (j.size.value == 0.0) err("fixed jump size must be nonzero");
                    break;
                case JumpSizeKind::Gaussian:
                    if (!(j.size.variance > 0.0)) err("gaussian jump variance must be > 0");
                    break;
                case JumpSizeKind::DoubleExponential:
                    if (!(j.size.eta_plus > 0.0) || !(j.size.eta_minus > 0.0))
                        err("double_exponential scales must be > 0");
                    break;
            }
            break;
        case JumpKind::StableLike:
            if (!(j.beta > 0.0 && j.beta < 2.0)) err("beta must be in (0,2)");
            if (!(j.scale > 0.0)) err("stable_like scale must be > 0");
            if (j.cutoff_override < 0.0) err("cutoff override must be >= 0");
            break;
    }
    if (!std::isfinite(spec.x0)) err("x0 must be finite");
    return report;
}

double activity_index(const ModelSpec& spec) {
    const ValidationReport report = validate_model(spec);
    if (!report.simulable()) throw std::invalid_argument("activity_index: invalid model: " + report.errors.front());
    return spec.jumps.kind == JumpKind::StableLike ? spec.jumps.beta : 0.0;
}

HypothesisProfile hypothesis_profile(const ModelSpec& spec) {
    const ValidationReport report = validate_model(spec);
    if (!report.simulable())
        throw std::invalid_argument("hypothesis_profile: invalid model: " + report.errors.front());
    HypothesisProfile profile;
    profile.h = true;
    profile.k = true;  // every catalog jump kind has a square-integrable bound
    switch (spec.jumps.kind) {
        case JumpKind::None:
        case JumpKind::CompoundPoisson:
            // finite Levy measure: integrability holds down to s = 0
            profile.levy_threshold = 0.0;
            profile.levy_threshold_strict = false;
            break;
        case JumpKind::StableLike:
            // bound gamma(x) ~ (x/scale)^{-1/beta}: int gamma^s dx < inf iff s > beta
            profile.levy_threshold = spec.jumps.beta;
            profile.levy_threshold_strict = true;
            break;
    }
    profile.h_prime = !(spec.vol.kind == VolKind::Constant && spec.vol.sigma0 == 0.0);
    return profile;
}

double TruncationSpec::threshold(double delta_n) const { return alpha * std::pow(delta_n, varpi); }

std::vector<std::string> TruncationSpec::validate() const {
    std::vector<std::string> out;
    if (!(varpi > 0.0 && varpi < 0.5)) out.push_back("varpi must be in (0, 1/2)");
    if (!(alpha > 0.0)) out.push_back("alpha must be > 0");
    return out;
}

}  // namespace powvar
