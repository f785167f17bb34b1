#pragma once

#include <string>
#include <vector>

namespace powvar {

// Observation grid: step delta_n on [0, horizon], refine fine substeps per
// observation step.  horizon must be an integer multiple of delta_n so the
// fine grid ends exactly at the horizon.
struct SamplingSpec {
    double horizon = 1.0;
    double delta_n = 1.0 / 256.0;
    int refine = 8;

    std::size_t n_observations() const;
    double fine_step() const { return delta_n / refine; }
    std::size_t n_fine_steps() const { return n_observations() * static_cast<std::size_t>(refine); }
    std::vector<std::string> validate() const;
};

enum class DriftKind { Constant, Sine };

struct DriftSpec {
    DriftKind kind = DriftKind::Constant;
    double level = 0.0;
    double amplitude = 0.0;  // sine only: b(t) = level + amplitude*sin(2*pi*frequency*t)
    double frequency = 1.0;

    double operator()(double t) const;
    static DriftSpec constant(double b) { return {DriftKind::Constant, b, 0.0, 1.0}; }
};

enum class VolKind { Constant, ExpOu, ExpOuJump };

// Stochastic vol is sigma_t = sigma0 * exp(Y_t) with OU factor
// dY = -mean_reversion * Y dt + vol_of_vol (leverage dW + sqrt(1-leverage^2) dW'),
// which keeps c_t strictly positive pathwise.  ExpOuJump additionally
// multiplies sigma by exp(jump_zeta) at every jump of X.
struct VolSpec {
    VolKind kind = VolKind::Constant;
    double sigma0 = 1.0;
    double mean_reversion = 0.0;
    double vol_of_vol = 0.0;
    double leverage = 0.0;
    double jump_zeta = 0.0;

    static VolSpec constant(double s0) { return {VolKind::Constant, s0, 0, 0, 0, 0}; }
    static VolSpec exp_ou(double s0, double lambda, double xi, double rho) {
        return {VolKind::ExpOu, s0, lambda, xi, rho, 0};
    }
    static VolSpec exp_ou_jump(double s0, double lambda, double xi, double rho, double zeta) {
        return {VolKind::ExpOuJump, s0, lambda, xi, rho, zeta};
    }
};

enum class JumpKind { None, CompoundPoisson, StableLike };
enum class JumpSizeKind { Fixed, Gaussian, DoubleExponential };
enum class SmallJumpPolicy { Discard, GaussianSubstitute };

struct JumpSizeSpec {
    JumpSizeKind kind = JumpSizeKind::Fixed;
    double value = 1.0;      // fixed
    double mean = 0.0;       // gaussian
    double variance = 1.0;   // gaussian
    double eta_plus = 1.0;   // double_exponential scales
    double eta_minus = 1.0;

    static JumpSizeSpec fixed(double a) { JumpSizeSpec s; s.kind = JumpSizeKind::Fixed; s.value = a; return s; }
    static JumpSizeSpec gaussian(double m, double v) {
        JumpSizeSpec s; s.kind = JumpSizeKind::Gaussian; s.mean = m; s.variance = v; return s;
    }
    static JumpSizeSpec double_exponential(double ep, double em) {
        JumpSizeSpec s; s.kind = JumpSizeKind::DoubleExponential; s.eta_plus = ep; s.eta_minus = em; return s;
    }
};

// stable_like: symmetric Levy density scale*beta/|x|^{1+beta} on 0 < |x| <= 1.
struct JumpSpec {
    JumpKind kind = JumpKind::None;
    double rate = 0.0;  // compound_poisson intensity
    JumpSizeSpec size;
    double beta = 0.5;   // stable_like activity index
    double scale = 0.1;  // stable_like density scale
    SmallJumpPolicy small_jump_policy = SmallJumpPolicy::Discard;
    double cutoff_override = 0.0;  // > 0 replaces the default fine_step^{1/beta}

    static JumpSpec none() { return {}; }
    static JumpSpec compound_poisson(double rate, JumpSizeSpec size) {
        JumpSpec j; j.kind = JumpKind::CompoundPoisson; j.rate = rate; j.size = size; return j;
    }
    static JumpSpec stable_like(double beta, double scale,
                                SmallJumpPolicy policy = SmallJumpPolicy::Discard) {
        JumpSpec j; j.kind = JumpKind::StableLike; j.beta = beta; j.scale = scale;
        j.small_jump_policy = policy; return j;
    }
};

struct ModelSpec {
    DriftSpec drift;
    VolSpec vol;
    JumpSpec jumps;
    double x0 = 0.0;
};

// Violations, ordered as checked.  "degenerate" entries mark the one allowed
// boundary case (constant sigma0 == 0): listed so callers see it, but
// simulation and LLN targets still accept such specs; CLT standardization
// refuses them later with a zero-variance error.
struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> degenerate;

    bool valid() const { return errors.empty() && degenerate.empty(); }
    bool simulable() const { return errors.empty(); }
    std::vector<std::string> all() const;
};

ValidationReport validate_model(const ModelSpec& spec);

// 0 for continuous / finite-activity jumps, beta for stable_like.
double activity_index(const ModelSpec& spec);

// Satisfied hypotheses.  L-s membership is upward-closed in s: it holds for
// all s >= levy_threshold (strictly above when levy_threshold_strict).
struct HypothesisProfile {
    bool h = false;
    bool k = false;
    bool h_prime = false;
    double levy_threshold = 0.0;
    bool levy_threshold_strict = false;

    bool satisfies_l(double s) const {
        if (s < 0.0 || s > 2.0) return false;
        return levy_threshold_strict ? s > levy_threshold : s >= levy_threshold;
    }
};

HypothesisProfile hypothesis_profile(const ModelSpec& spec);

// Cut-off exponent/level for the truncated realized variance.
struct TruncationSpec {
    double varpi = 0.49;
    double alpha = 3.0;

    double threshold(double delta_n) const;
    std::vector<std::string> validate() const;
};

}  // namespace powvar
